#pragma once

#include <stdexcept>
#include <string>

namespace qdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument to an operator/superoperator constructor (unknown label,
/// layout mismatch, negative rate, non-Hermitian Hamiltonian, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Quadrature or kernel-table failure in the phonon module.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Linear solver, residual or positivity failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdl
