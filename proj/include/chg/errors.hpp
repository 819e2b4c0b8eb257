#pragma once

#include <stdexcept>
#include <string>

namespace chg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: length mismatch, grid mismatch, out-of-band mode.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Coefficients that do not describe a real-valued field.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// An exponential weight or a power produced a non-finite value.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the admissible window of a time/radius formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Too few Fourier modes above the noise floor to fit a decay rate.
class InsufficientDecayError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config error in '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace chg
