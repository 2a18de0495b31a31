#pragma once

#include <stdexcept>
#include <string>

namespace hitrun {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's contract
/// (dimension mismatch, zero direction, unsupported dimension, ...).
class UsageError : public Error {
  public:
    using Error::Error;
};

/// A point that must lie in the body does not.
class DomainError : public Error {
  public:
    using Error::Error;
};

class DegenerateChordError : public Error {
  public:
    using Error::Error;
};

/// A chain step could not be completed (e.g. repeated degenerate chords).
class StepError : public Error {
  public:
    using Error::Error;
};

/// Sample-based construction hit singular or rank-deficient data.
class DegenerateDataError : public Error {
  public:
    using Error::Error;
};

/// An estimator's stated precondition does not hold for the given inputs.
/// This is not a failure of the property under test.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

class UnderflowError : public Error {
  public:
    using Error::Error;
};

/// Rejection sampling exceeded its iteration cap.
class EfficiencyError : public Error {
  public:
    using Error::Error;
};

/// Explicit time-stepping became unstable; retry with a smaller step.
class StepSizeError : public Error {
  public:
    using Error::Error;
};

}  // namespace hitrun
