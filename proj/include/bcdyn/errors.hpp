#pragma once

#include <stdexcept>
#include <string>

namespace bcdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. r < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model / run configuration (κ out of range, bad kernel string, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Requested mode is not supported by the operation (e.g. build_gamma with κ ≠ 1).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Iterative scheme failed to converge, or a step produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// More discontinuity events than StepControl::max_events.
class RunawayEventsError : public Error {
 public:
  using Error::Error;
};

/// Enumeration of tie resolutions would exceed the desk-scale guard.
class CombinatorialBlowupError : public Error {
 public:
  using Error::Error;
};

/// Sliding would have to happen on more than one manifold at once.
class UnsupportedSlidingError : public Error {
 public:
  using Error::Error;
};

/// Branch enumeration exceeded its budget.
class BranchOverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcdyn
