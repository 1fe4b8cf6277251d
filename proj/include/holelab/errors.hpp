#pragma once

#include <stdexcept>
#include <string>

namespace holelab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Geometric description violates an inclusion or validity invariant.
class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// Mesh grading could not be realized for the requested parameters.
class GradingFailure : public Error {
public:
  using Error::Error;
};

/// Malformed or semantically invalid configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Divergence datum and boundary flux disagree.
class CompatibilityError : public Error {
public:
  CompatibilityError(const std::string& what, double mismatch)
      : Error(what), mismatch_(mismatch) {}
  double mismatch() const { return mismatch_; }

private:
  double mismatch_;
};

/// Factorization or solve failed.
class SolverError : public Error {
public:
  using Error::Error;
};

/// The source does not drive a nonzero velocity at the origin.
class DegenerateSource : public Error {
public:
  using Error::Error;
};

}  // namespace holelab
