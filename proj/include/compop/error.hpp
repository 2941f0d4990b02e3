#pragma once

#include <stdexcept>
#include <string>

namespace compop {

// Every error raised by the library derives from Error so callers (the CLI in
// particular) can map failures to exit codes by category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a tabulated weight, a cloud box, etc.
class DomainError : public Error {
  using Error::Error;
};

/// A hypothesis of the form "u satisfies ..." fails on the grid.
class ConditionViolated : public Error {
  using Error::Error;
};

class DegenerateCloud : public Error {
  using Error::Error;
};

class QuadratureDomainError : public Error {
  using Error::Error;
};

class StripViolation : public Error {
  using Error::Error;
};

class PositivityViolation : public Error {
  using Error::Error;
};

class ExactnessViolated : public Error {
  using Error::Error;
};

class OrthonormalizationFailure : public Error {
  using Error::Error;
};

/// Cholesky pivot <= 0; consumed by the jitter escalation protocol.
class CholeskyFailure : public Error {
  using Error::Error;
};

/// Iterative solver did not converge, or escalation was exhausted.
class NumericError : public Error {
  using Error::Error;
};

class SizeError : public Error {
  using Error::Error;
};

class UnsupportedMap : public Error {
  using Error::Error;
};

class ValidationError : public Error {
  using Error::Error;
};

}  // namespace compop
