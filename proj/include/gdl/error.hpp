#pragma once

#include <stdexcept>
#include <string>

namespace gdl {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed ensemble, grid or file. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a result. The CLI maps this to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DimensionMismatch : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotHermitian : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotPositiveDefinite : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoConvergence : public NumericError {
 public:
  using NumericError::NumericError;
};

class BracketFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularPoint : public NumericError {
 public:
  using NumericError::NumericError;
};

class EmptyBoundary : public NumericError {
 public:
  using NumericError::NumericError;
};

class SupportEscape : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace gdl
