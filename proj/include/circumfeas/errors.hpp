#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace circumfeas {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatches, malformed arguments, violated preconditions.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Three distinct collinear points have no circumcenter.
class DegenerateCircumcenter : public Error {
  public:
    using Error::Error;
};

/// An iterative projection (epigraph root or Newton solve) did not converge.
class ProjectionFailure : public Error {
  public:
    using Error::Error;
};

/// A driver produced a non-finite iterate.
class NumericalFailure : public Error {
  public:
    NumericalFailure(const std::string &what, std::size_t iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

  private:
    std::size_t iteration_;
};

/// A (K, U) pair that a method cannot be applied to, e.g. CRM with a
/// non-affine U.
class InvalidProblem : public Error {
  public:
    using Error::Error;
};

/// An analysis that the problem does not support (non-singleton
/// intersections for the error-bound estimate).
class UnsupportedProblem : public Error {
  public:
    using Error::Error;
};

/// Too few usable entries in an error sequence for rate estimation.
class InsufficientData : public Error {
  public:
    using Error::Error;
};

/// An instance specification that violates its family's assumptions.
class InvalidInstance : public Error {
  public:
    using Error::Error;
};

} // namespace circumfeas
