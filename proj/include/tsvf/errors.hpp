#pragma once

#include <stdexcept>
#include <string>

namespace tsvf {

// Root of the exception hierarchy. what() always starts with the stable
// error name, which the CLI surfaces verbatim.
class Error : public std::runtime_error {
 public:
  Error(const std::string& name, const std::string& detail)
      : std::runtime_error(name + ": " + detail), name_(name), detail_(detail) {}
  const std::string& name() const { return name_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string name_;
  std::string detail_;
};

// A physically impossible request on otherwise well-formed inputs (exit 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed inputs or API misuse (exit 2).
class InputError : public Error {
 public:
  using Error::Error;
};

class NullEvent : public DomainError {
 public:
  explicit NullEvent(const std::string& d) : DomainError("NullEvent", d) {}
};

class OrthogonalSelection : public DomainError {
 public:
  explicit OrthogonalSelection(const std::string& d)
      : DomainError("OrthogonalSelection", d) {}
};

class NullSelection : public DomainError {
 public:
  explicit NullSelection(const std::string& d)
      : DomainError("NullSelection", d) {}
};

class RegimeViolation : public DomainError {
 public:
  explicit RegimeViolation(const std::string& d)
      : DomainError("RegimeViolation", d) {}
};

class ValidationError : public InputError {
 public:
  explicit ValidationError(const std::string& d)
      : InputError("ValidationError", d) {}
  ValidationError(const std::string& field_path, const std::string& d)
      : InputError("ValidationError", "at '" + field_path + "': " + d) {}
};

class ParseError : public InputError {
 public:
  explicit ParseError(const std::string& d) : InputError("ParseError", d) {}
  ParseError(const std::string& field_path, const std::string& d)
      : InputError("ParseError", "at '" + field_path + "': " + d) {}
};

class DimensionMismatch : public InputError {
 public:
  explicit DimensionMismatch(const std::string& d)
      : InputError("DimensionMismatch", d) {}
};

class NonHermitian : public InputError {
 public:
  explicit NonHermitian(const std::string& d)
      : InputError("NonHermitian", d) {}
};

class DependentSpan : public InputError {
 public:
  explicit DependentSpan(const std::string& d)
      : InputError("DependentSpan", d) {}
};

class NotAProjector : public InputError {
 public:
  explicit NotAProjector(const std::string& d)
      : InputError("NotAProjector", d) {}
};

class UnsupportedDescription : public InputError {
 public:
  explicit UnsupportedDescription(const std::string& d)
      : InputError("UnsupportedDescription", d) {}
};

}  // namespace tsvf
