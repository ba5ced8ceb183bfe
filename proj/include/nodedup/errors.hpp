#pragma once

#include <stdexcept>
#include <string>

namespace nodedup {

// Base of every error the library raises on bad input. The CLI maps the
// concrete subclasses to process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or option value (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or activations during training (exit code 4).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace nodedup
