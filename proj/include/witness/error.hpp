#pragma once

#include <stdexcept>
#include <string>

namespace witness {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the domain of the operation (bad dimension,
/// photon count, probability, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An input violates a structural precondition (non-unitary matrix,
/// non-orthonormal rows, non-PSD Gram matrix, ...).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete experiment configuration. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a meaningful result (no postselected
/// events, zero standard error, unreachable target). Maps to CLI exit code 3.
class StatisticalError : public Error {
 public:
  using Error::Error;
};

}  // namespace witness
