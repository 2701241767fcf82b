#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "perifit/signal.hpp"

namespace perifit {

struct HurwitzCheck {
  bool ok = false;
  std::vector<std::complex<double>> roots;  // of s^{n-1} + b1 s^{n-2} + ... + b_{n-1}
};

/// Stability test for the filter polynomial attached to b = (1, b1, ..., b_{n-1}).
/// Vacuously true for n = 1. A root passes when its real part is below
/// -eps_margin.
HurwitzCheck check_hurwitz(const Eigen::VectorXd& b, double eps_margin = 1e-9);

/// g(y, t) for one fixed parameter vector.
using NonlinearityFn = std::function<Eigen::VectorXd(double y, double t)>;

/// Builds g(.,.) for a given nonlinear parameter vector and measured signal.
/// Preparing may itself do work (e.g. eliminate internal states against the
/// signal), which is why the predictor prepares once per parameter value
/// instead of re-deriving state inside every g call.
using NonlinearityFactory = std::function<NonlinearityFn(
    const Eigen::VectorXd& lambda, const SampledSignal& y)>;

using RegressorFn = std::function<Eigen::VectorXd(double y, double t)>;

/// System description in adaptive-observer canonical form:
///
///   x' = A0 x + b phi(y,t)^T theta + g(y, lambda, t),   y = x_1,
///
/// with A0 the n-dimensional shift (chain integrator) block, b = (1, b1, ...,
/// b_{n-1})^T attached to a Hurwitz polynomial, phi the r-dimensional
/// regressor of the linearly entering parameters, and g the nonlinearity
/// carrying the k_lambda nonlinearly entering parameters.
class CanonicalForm {
 public:
  CanonicalForm(int n, int r, int k_lambda, Eigen::VectorXd b,
                RegressorFn regressor, NonlinearityFactory nonlinearity);

  int n() const noexcept { return n_; }
  int r() const noexcept { return r_; }
  int k_lambda() const noexcept { return k_lambda_; }
  const Eigen::VectorXd& b() const noexcept { return b_; }

  /// A0: ones on the first superdiagonal, zero elsewhere.
  Eigen::MatrixXd a0() const;

  /// phi(y, t); validates the returned length.
  Eigen::VectorXd regressor(double y, double t) const;

  NonlinearityFn prepare_nonlinearity(const Eigen::VectorXd& lambda,
                                      const SampledSignal& y) const;

  /// Convenience single-point evaluation of g; prepares internally each call.
  Eigen::VectorXd nonlinearity(double y_value, const Eigen::VectorXd& lambda,
                               const SampledSignal& y_signal, double t) const;

 private:
  int n_, r_, k_lambda_;
  Eigen::VectorXd b_;
  RegressorFn regressor_;
  NonlinearityFactory nonlinearity_;
};

/// Diagonal auxiliary dynamics q_i' = alpha_i(y, lambda, t) q_i + w_i(y,
/// lambda, t), eliminable in closed form against periodic y.
struct AuxStateSpec {
  int d = 0;
  std::function<Eigen::VectorXd(double y, const Eigen::VectorXd& lambda,
                                double t)>
      alpha;
  std::function<Eigen::VectorXd(double y, const Eigen::VectorXd& lambda,
                                double t)>
      w;
};

struct AuxPeriodicSolution {
  std::vector<SampledSignal> q;  ///< one dense periodic trace per component
  Eigen::VectorXd q0;            ///< periodic boundary value q(t0) = q(t0+T)
};

/// Unique periodic solution of the auxiliary dynamics over one period of y:
///
///   q0 = (1 - e^{∫_0^T alpha})^{-1} ∫_0^T e^{∫_z^T alpha} w(z) dz
///
/// componentwise, evaluated with prefix-summed exponent integrals so the
/// whole trace costs one pass. Requires contraction over the period
/// (∫_0^T alpha_i < 0); throws PeriodicityError otherwise, and
/// ConditioningError when 1 - e^{∫ alpha} is numerically singular.
AuxPeriodicSolution aux_state_closed_form(const AuxStateSpec& spec,
                                          const Eigen::VectorXd& lambda_bar,
                                          const SampledSignal& y,
                                          int substeps_per_sample = 10);

}  // namespace perifit
