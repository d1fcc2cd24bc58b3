#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parachain {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures. The CLI maps these to exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be positive definite is not. Typically an indefinite
// lugsail estimate reaching a consumer that needs a determinant or inverse.
class NotPositiveDefinite : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateInput : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TooFewBatches : public NumericError {
 public:
  using NumericError::NumericError;
};

class TooFewChains : public NumericError {
 public:
  using NumericError::NumericError;
};

class BadLugsailParams : public NumericError {
 public:
  using NumericError::NumericError;
};

// Input and configuration failures. The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnequalChainLengths : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace parachain
