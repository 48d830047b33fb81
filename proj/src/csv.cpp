#include "drtplan/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "drtplan/error.hpp"

namespace drtplan {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

CsvTable CsvTable::read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

CsvTable CsvTable::parse(std::string_view text, std::string source_name) {
  CsvTable table;
  table.source_ = std::move(source_name);
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool have_header = false;

  auto finish_field = [&] {
    record.push_back(field_quoted ? field : trim(field));
    field.clear();
    field_quoted = false;
  };
  auto finish_record = [&] {
    finish_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (!have_header) {
        table.header_ = std::move(record);
        have_header = true;
      } else {
        table.rows_.push_back(std::move(record));
        table.line_numbers_.push_back(record_line);
      }
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_quoted = true;
        break;
      case ',':
        finish_field();
        break;
      case '\r':
        break;
      case '\n':
        finish_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw_data(fmt::format("{}:{}: unterminated quoted field", table.source_, record_line));
  if (!field.empty() || !record.empty()) finish_record();
  if (!have_header) throw_data(fmt::format("{}: empty file (no header)", table.source_));
  for (auto& h : table.header_) h = trim(h);
  return table;
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  return std::nullopt;
}

std::size_t CsvTable::require_column(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  throw_data(fmt::format("{}: missing required column '{}'", source_, name));
}

const std::string& CsvTable::cell(std::size_t row, std::size_t col) const {
  static const std::string kEmpty;
  const auto& r = rows_.at(row);
  return col < r.size() ? r[col] : kEmpty;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = cell(row, col);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw_data(fmt::format("{}: column '{}': '{}' is not a number", where(row), header_.at(col), s));
  return value;
}

long long CsvTable::integer(std::size_t row, std::size_t col) const {
  const std::string& s = cell(row, col);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw_data(fmt::format("{}: column '{}': '{}' is not an integer", where(row), header_.at(col), s));
  return value;
}

std::string CsvTable::where(std::size_t row) const {
  return fmt::format("{}:{}", source_, line_numbers_.at(row));
}

}  // namespace drtplan
