#pragma once

#include <stdexcept>
#include <string>

namespace diracgap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was invoked outside its domain (e.g. a window that is not
/// inside a spectral gap, or c below the admissible threshold).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The numerics could not deliver the requested accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace diracgap
