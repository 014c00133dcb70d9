#pragma once

#include <stdexcept>
#include <string>

namespace triage {

// Base for every error raised by the library. The CLI maps the concrete
// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters supplied by the caller (exit code 1 at the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, missing or inconsistent input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or solver failures (exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace triage
