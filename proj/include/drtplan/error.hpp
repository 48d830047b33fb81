#pragma once

#include <stdexcept>
#include <string>

namespace drtplan {

// Failure category. Maps one-to-one onto the C API status codes and the CLI
// exit codes.
enum class ErrorKind {
  Config = 1,
  Data = 2,
  Infeasible = 3,
  InvalidArgument = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void throw_data(const std::string& msg) { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, msg);
}

}  // namespace drtplan
