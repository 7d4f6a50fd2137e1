#pragma once

#include <stdexcept>
#include <string>

namespace flawnet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched matrix / layer dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// API used out of order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed, inconsistent or degenerate input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values encountered during computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested parameter parity cannot be met.
class ParityError : public Error {
 public:
  using Error::Error;
};

}  // namespace flawnet
