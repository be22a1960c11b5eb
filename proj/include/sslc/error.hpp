#pragma once

#include <stdexcept>
#include <string>

namespace sslc {

// Exit codes used by the command-line front end.
enum class ErrorKind : int {
  config = 2,
  infeasible = 3,
  io = 4,
};

inline const char* error_tag(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Errors that carry an exit code. Plain precondition violations in the
// library use std::invalid_argument / std::domain_error instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

// Raised when a computation is well-posed but not executable at the
// configured resolution (e.g. clipping balls smaller than a cell).
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorKind::infeasible, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace sslc
