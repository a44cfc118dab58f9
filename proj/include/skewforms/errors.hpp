#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skewforms {

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable tag used by the command-line front end.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  [[nodiscard]] const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("E_SYNTAX", "syntax error at byte " + std::to_string(offset) + ": " + message), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
 public:
  explicit UnknownIdentifierError(const std::string& name)
      : Error("E_UNKNOWN_IDENT", "unknown identifier '" + name + "'"), name_(name) {}
  [[nodiscard]] const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Evaluation hit a singularity: division by zero, ln of a non-positive
/// value, sqrt of a negative value, or a non-finite intermediate.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("E_DOMAIN", message) {}
};

class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(const std::string& name)
      : Error("E_UNBOUND", "unbound variable '" + name + "'"), name_(name) {}
  [[nodiscard]] const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InconclusiveError : public Error {
 public:
  explicit InconclusiveError(const std::string& message) : Error("E_INCONCLUSIVE", message) {}
};

class ValidationError : public Error {
 public:
  ValidationError(std::string code, const std::string& message) : Error(std::move(code), message) {}
  explicit ValidationError(const std::string& message) : Error("E_VALIDATION", message) {}
};

/// A transformation whose Jacobian or Hessian determinant vanishes where an
/// invertible one is required.
class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& message) : Error("E_DEGENERATE", message) {}
};

}  // namespace skewforms
