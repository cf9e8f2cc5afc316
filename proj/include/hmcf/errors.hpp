#pragma once

#include <stdexcept>
#include <string>

namespace hmcf {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated call contract (bad sizes, bad parameters).
class InvalidConfigError : public Error {
  public:
    using Error::Error;
};

/// Two objects that must share a grid do not.
class GridMismatchError : public Error {
  public:
    using Error::Error;
};

/// S_thth + S became non-positive somewhere: the equation is no longer
/// hyperbolic in time and the run must abort.
/// stage: -1 outside time stepping, 0..3 the RK stage, 4 post-step validation.
class HyperbolicityLostError : public Error {
  public:
    HyperbolicityLostError(const std::string& what, int stage_ = -1)
        : Error(what), stage(stage_) {}
    int stage = -1;
};

/// Non-finite values appeared. Same stage convention as HyperbolicityLostError.
class NumericalFailureError : public Error {
  public:
    NumericalFailureError(const std::string& what, int stage_ = -1)
        : Error(what), stage(stage_) {}
    int stage = -1;
};

/// The requested quantity is not defined for this input (e.g. collapse
/// extrapolation of a run that did not collapse).
class NotApplicableError : public Error {
  public:
    using Error::Error;
};

/// A series operation needs more records than the trajectory holds.
class TooFewRecordsError : public Error {
  public:
    using Error::Error;
};

/// String initial data or state is not time-like.
class TimelikeViolationError : public Error {
  public:
    using Error::Error;
};

/// |X_u| vanished somewhere: the string parametrization is degenerate.
class DegenerateParametrizationError : public Error {
  public:
    using Error::Error;
};

} // namespace hmcf
