#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "perifit/canonical.hpp"
#include "perifit/runge_kutta.hpp"
#include "perifit/signal.hpp"

namespace perifit {

/// Output-injection gain l with A0 + l C^T Hurwitz, plus a Lyapunov
/// certificate (P, Q) for the passivity conditions P(A0+lC^T) + (A0+lC^T)^T P
/// = -Q, P b = C when one was computed.
struct ObserverGain {
  Eigen::VectorXd l;
  bool has_certificate = false;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
};

/// Pick a gain by pole placement on the closed-loop polynomial and certify it
/// by solving the constrained Lyapunov least-squares problem for P. q_seed
/// (default identity) seeds the Lyapunov target; the certificate carries the
/// achieved Q. Throws GainSelectionError when no positive-definite pair is
/// found within the candidate budget.
ObserverGain select_gain(const CanonicalForm& system,
                         const Eigen::MatrixXd& q_seed = Eigen::MatrixXd());

/// A0 + l C^T.
Eigen::MatrixXd closed_loop_matrix(const CanonicalForm& system,
                                   const ObserverGain& gain);

/// The (n+r) x (n+r) system matrix of the extended observer error dynamics:
///   [ A0 + l C^T    b phi^T ]
///   [ -phi C^T      0       ]
/// with phi = phi(y(t), t).
Eigen::MatrixXd build_extended_matrix(const CanonicalForm& system,
                                      const ObserverGain& gain,
                                      const SampledSignal& y, double t);

struct PhiGridConfig {
  double dt_int = 2e-4;         ///< integrator step (rounded to divide storage)
  RkScheme scheme = RkScheme::DormandPrince5;
  int store_per_sample = 2;     ///< storage nodes per signal sample; even, >= 2
  double condition_bound = 1e12;
  bool interpolate_lookup = false;  ///< phi_at: nearest node (default) or linear
};

/// Fundamental solution matrices Phi(t_j, t0) of the extended system on a
/// uniform storage grid over one period, their LU inverses, and the
/// monodromy matrix Phi(t0+T, t0). Immutable once built; shared read-only
/// across parallel predictor evaluations.
struct FundamentalMatrixGrid {
  double t0 = 0.0;
  double dt_grid = 0.0;    ///< storage spacing
  double period = 0.0;
  int store_per_sample = 2;
  double dt_int = 0.0;     ///< integrator step actually used
  std::vector<Eigen::MatrixXd> matrices;  ///< Phi(t_j, t0), j = 0..J
  std::vector<Eigen::MatrixXd> inverses;
  double spectral_radius = 0.0;  ///< of the monodromy matrix
  double max_condition = 0.0;    ///< worst per-node condition estimate

  const Eigen::MatrixXd& monodromy() const { return matrices.back(); }
  std::size_t nodes() const { return matrices.size(); }
  double time_at(std::size_t j) const {
    return t0 + static_cast<double>(j) * dt_grid;
  }
};

/// Integrate all n+r basis columns of Phi simultaneously as one matrix ODE
/// from Phi(t0, t0) = I over one period of y, storing every dt_grid =
/// y.dt() / store_per_sample.
FundamentalMatrixGrid compute_phi_grid(const CanonicalForm& system,
                                       const ObserverGain& gain,
                                       const SampledSignal& y,
                                       const PhiGridConfig& config = {});

/// Phi(t, t0) for t in [t0, t0+T]; RangeError outside (reduce mod T first).
Eigen::MatrixXd phi_at(const FundamentalMatrixGrid& grid, double t);
Eigen::MatrixXd phi_inv_at(const FundamentalMatrixGrid& grid, double t);

/// Write the grid as CSV rows: t_j followed by row-major entries of Phi(t_j, t0).
void dump_phi_csv(const FundamentalMatrixGrid& grid, const std::string& path);

}  // namespace perifit
