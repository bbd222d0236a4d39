#pragma once

#include <stdexcept>
#include <string>

namespace lqsplit {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square input, mismatched blocks).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid numeric input: non-finite entries, asymmetric or indefinite
/// weights, singular weighting matrices.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular to working precision.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on a problem it does not support.
class MisuseError : public Error {
 public:
  using Error::Error;
};

/// Bad scheme, preset or config-file settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver could not reach the requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace lqsplit
