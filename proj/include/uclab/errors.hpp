#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uclab {

/// Argument outside the mathematical domain of an operation (p < 0, g(0), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller misuse: mismatched label spaces, non-closed family where closure is required.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds what the exhaustive code paths can handle.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = "")
      : std::runtime_error(compose(line, detail, source)), line_(line), detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string compose(std::size_t line, const std::string& detail, const std::string& source) {
    std::string where = source;
    if (line != 0) where += (where.empty() ? "line " : ":") + std::to_string(line);
    return where.empty() ? detail : where + ": " + detail;
  }

  std::size_t line_;
  std::string detail_;
};

}  // namespace uclab
