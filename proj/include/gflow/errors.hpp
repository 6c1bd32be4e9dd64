#pragma once

#include <stdexcept>
#include <string>

namespace gflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent grid, cutoff, padding or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An exponential weight or a norm left the double range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to the wrong kind of field (scalar vs vector).
class FieldTypeError : public Error {
 public:
  using Error::Error;
};

/// Model state violates a structural invariant.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Physical or model parameter out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Series evaluated outside its radius of convergence.
class RadiusError : public Error {
 public:
  using Error::Error;
};

/// Analyticity radius beta0 - delta*s is no longer positive.
class RadiusExhaustedError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gflow
