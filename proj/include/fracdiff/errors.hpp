#pragma once

#include <stdexcept>
#include <string>

namespace fracdiff {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fractional order outside the range an operation accepts.
class InvalidOrder : public Error {
public:
  using Error::Error;
};

class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// Derivative form and boundary conditions for which no scheme is defined.
class UnsupportedCombination : public Error {
public:
  using Error::Error;
};

/// Flux requested for a derivative form that has none (raw Caputo).
class UnsupportedForm : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// LU factorization of (I - beta B^T) met a numerically zero pivot.
class SingularSystem : public Error {
public:
  using Error::Error;
};

/// Explicit step size above h^alpha / (C alpha) without an override.
class StabilityViolation : public Error {
public:
  using Error::Error;
};

class EmptySeries : public Error {
public:
  using Error::Error;
};

/// Too few usable points for a least-squares fit, or a zero norm in the window.
class DegenerateInput : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Bad command line. The CLI maps this to exit code 2.
class UsageError : public Error {
public:
  using Error::Error;
};

}  // namespace fracdiff
