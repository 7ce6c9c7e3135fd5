#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry or run configuration violates an invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Degenerate mesh (zero-length element, empty segment list, ...).
class MeshError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergent quadrature, rank-deficient system.
class NumericError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. asking for derivatives that were not computed.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace casimir
