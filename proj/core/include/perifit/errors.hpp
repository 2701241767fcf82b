#pragma once

#include <stdexcept>
#include <string>

namespace perifit {

/// Bad inputs: malformed files, out-of-range options, violated type
/// invariants. The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failures encountered while running an otherwise valid problem.
/// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required periodicity/contraction property does not hold (no periodic
/// solution, data not oscillatory, ...).
class PeriodicityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A matrix that must be inverted is too ill-conditioned to trust.
class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Spectral-radius / exponential-stability requirement violated.
class StabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// State became non-finite during time integration.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No observer gain with a valid certificate found within the search budget.
class GainSelectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Query outside the stored grid range.
class RangeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A user-supplied function produced a non-finite value. Carries the time at
/// which the evaluation failed.
class EvalError : public NumericalError {
 public:
  EvalError(const std::string& what, double t)
      : NumericalError(what + " (at t=" + std::to_string(t) + ")"), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace perifit
