#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drtplan {

// Header-indexed CSV table (RFC 4180 quoting, CRLF tolerant, UTF-8 BOM
// stripped). Cells are kept as strings; typed access goes through the
// accessors which report file/line context on failure.
class CsvTable {
 public:
  static CsvTable read_file(const std::filesystem::path& path);
  static CsvTable parse(std::string_view text, std::string source_name = "<memory>");

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  bool has_column(std::string_view name) const { return find_column(name).has_value(); }
  std::optional<std::size_t> find_column(std::string_view name) const;

  // Throws a data error naming the column when it is missing.
  std::size_t require_column(std::string_view name) const;

  const std::string& cell(std::size_t row, std::size_t col) const;
  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;

  // Human-readable "file:line" for a data row (1-based, header is line 1).
  std::string where(std::size_t row) const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

}  // namespace drtplan
