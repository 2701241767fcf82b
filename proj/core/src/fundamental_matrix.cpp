#include "perifit/fundamental_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "perifit/errors.hpp"

namespace perifit {

namespace {

// Multiply out (s + a) * (s^{n-1} + b1 s^{n-2} + ... + b_{n-1}); returns the
// non-leading coefficients c1..cn of the monic closed-loop polynomial.
Eigen::VectorXd closed_loop_coeffs(const Eigen::VectorXd& b, double a) {
  const auto n = b.size();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  // coefficients of B(s): [1, b1, ..., b_{n-1}]
  for (Eigen::Index i = 0; i < n; ++i) {
    const double bi = (i == 0) ? 1.0 : b(i);
    // s * bi s^{n-1-i} contributes to c at power n-i; a * bi to power n-1-i.
    if (i > 0) c(i - 1) += bi;
    c(i) += a * bi;
  }
  return c;  // c(k) multiplies s^{n-1-k}
}

// Symmetric-matrix packing helpers for the constrained Lyapunov solve.
Eigen::MatrixXd unpack_sym(const Eigen::VectorXd& p, int n) {
  Eigen::MatrixXd m(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m(i, j) = p(k);
      m(j, i) = p(k);
      ++k;
    }
  return m;
}

bool is_spd(const Eigen::MatrixXd& m, double rel_tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() > rel_tol * scale;
}

}  // namespace

Eigen::MatrixXd closed_loop_matrix(const CanonicalForm& system,
                                   const ObserverGain& gain) {
  Eigen::MatrixXd a = system.a0();
  a.col(0) += gain.l;
  return a;
}

ObserverGain select_gain(const CanonicalForm& system,
                         const Eigen::MatrixXd& q_seed) {
  const int n = system.n();
  Eigen::VectorXd c_vec = Eigen::VectorXd::Zero(n);
  c_vec(0) = 1.0;

  Eigen::MatrixXd seed;
  if (q_seed.size() == 0) {
    seed = Eigen::MatrixXd::Identity(n, n);
  } else {
    if (q_seed.rows() != n || q_seed.cols() != n)
      throw ValidationError("select_gain: Q seed must be n x n");
    if (!q_seed.isApprox(q_seed.transpose(), 1e-10) || !is_spd(q_seed))
      throw ValidationError("select_gain: Q seed must be symmetric positive definite");
    seed = q_seed;
  }

  const int dof = n * (n + 1) / 2;
  const double pole_grid[] = {1.0, 2.0, 0.5, 4.0, 0.25, 8.0, 16.0};
  const double seed_scales[] = {1.0, 4.0, 16.0, 64.0, 256.0, 0.25};

  for (double a : pole_grid) {
    // Candidate gain: closed-loop polynomial (s + a) * B(s). The companion
    // structure of A0 + l C^T gives det(sI - A) = s^n - l1 s^{n-1} - ... - ln.
    Eigen::VectorXd coeffs = closed_loop_coeffs(system.b(), a);
    Eigen::VectorXd l = -coeffs;

    ObserverGain candidate;
    candidate.l = l;
    Eigen::MatrixXd acl = closed_loop_matrix(system, candidate);

    // Map from packed symmetric P to [vech(A^T P + P A); P b].
    const int lyap_rows = dof;
    Eigen::MatrixXd lyap_map = Eigen::MatrixXd::Zero(lyap_rows, dof);
    Eigen::MatrixXd con_map = Eigen::MatrixXd::Zero(n, dof);
    {
      int col = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Eigen::VectorXd unit = Eigen::VectorXd::Zero(dof);
          unit(col) = 1.0;
          Eigen::MatrixXd pbasis = unpack_sym(unit, n);
          Eigen::MatrixXd lres = acl.transpose() * pbasis + pbasis * acl;
          int row = 0;
          for (int ii = 0; ii < n; ++ii)
            for (int jj = ii; jj < n; ++jj) lyap_map(row++, col) = lres(ii, jj);
          con_map.col(col) = pbasis * system.b();
          ++col;
        }
    }

    // Affine slice { P symmetric : P b = C } via complete orthogonal
    // decomposition; least-squares Lyapunov fit inside the slice.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(con_map);
    Eigen::VectorXd p_particular = cod.pseudoInverse() * c_vec;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(con_map, Eigen::ComputeFullV);
    const auto rank = svd.rank();
    Eigen::MatrixXd nullspace = svd.matrixV().rightCols(dof - rank);

    for (double scale : seed_scales) {
      Eigen::VectorXd q_target(dof);
      {
        Eigen::MatrixXd qs = scale * seed;
        int row = 0;
        for (int ii = 0; ii < n; ++ii)
          for (int jj = ii; jj < n; ++jj) q_target(row++) = qs(ii, jj);
      }
      Eigen::VectorXd p_packed;
      if (nullspace.cols() > 0) {
        Eigen::MatrixXd reduced = lyap_map * nullspace;
        Eigen::VectorXd resid = -q_target - lyap_map * p_particular;
        Eigen::VectorXd mu = reduced.colPivHouseholderQr().solve(resid);
        p_packed = p_particular + nullspace * mu;
      } else {
        p_packed = p_particular;
      }

      Eigen::MatrixXd p = unpack_sym(p_packed, n);
      Eigen::MatrixXd q = -(acl.transpose() * p + p * acl);
      q = 0.5 * (q + q.transpose());

      if ((p * system.b() - c_vec).norm() > 1e-8) continue;
      if (!is_spd(p) || !is_spd(q)) continue;

      candidate.has_certificate = true;
      candidate.P = p;
      candidate.Q = q;
      return candidate;
    }
  }
  throw GainSelectionError(
      "select_gain: no gain with positive-definite certificate found within "
      "the search budget");
}

Eigen::MatrixXd build_extended_matrix(const CanonicalForm& system,
                                      const ObserverGain& gain,
                                      const SampledSignal& y, double t) {
  const int n = system.n();
  const int r = system.r();
  const double yt = y.eval(t);
  const Eigen::VectorXd phi = system.regressor(yt, t);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + r, n + r);
  m.topLeftCorner(n, n) = closed_loop_matrix(system, gain);
  m.topRightCorner(n, r) = system.b() * phi.transpose();
  m.bottomLeftCorner(r, n).col(0) = -phi;
  return m;
}

FundamentalMatrixGrid compute_phi_grid(const CanonicalForm& system,
                                       const ObserverGain& gain,
                                       const SampledSignal& y,
                                       const PhiGridConfig& config) {
  if (config.store_per_sample < 2 || config.store_per_sample % 2 != 0)
    throw ValidationError("phi grid: store_per_sample must be even and >= 2");
  if (!(config.dt_int > 0.0))
    throw ValidationError("phi grid: dt_int must be positive");

  const int n = system.n();
  const int r = system.r();
  const int dim = n + r;
  const double dt_store = y.dt() / config.store_per_sample;
  auto steps_per_node = static_cast<std::size_t>(
      std::llround(std::max(1.0, dt_store / config.dt_int)));
  const double dt_int = dt_store / static_cast<double>(steps_per_node);
  if (std::abs(dt_int - config.dt_int) > 0.01 * config.dt_int) {
    std::fprintf(stderr,
                 "phi grid: dt_int rounded from %g to %g to divide the "
                 "storage spacing\n",
                 config.dt_int, dt_int);
  }

  const std::size_t n_nodes =
      y.size() * static_cast<std::size_t>(config.store_per_sample) + 1;

  const Eigen::MatrixXd acl = closed_loop_matrix(system, gain);
  const Eigen::VectorXd b = system.b();
  auto rhs = [&](double t, const Eigen::MatrixXd& phi_mat) -> Eigen::MatrixXd {
    const double yt = y.eval(t);
    const Eigen::VectorXd phi = system.regressor(yt, t);
    Eigen::MatrixXd m(dim, dim);
    m.topLeftCorner(n, n) = acl;
    m.topRightCorner(n, r) = b * phi.transpose();
    m.bottomRightCorner(r, r).setZero();
    m.bottomLeftCorner(r, n).setZero();
    m.bottomLeftCorner(r, n).col(0) = -phi;
    return m * phi_mat;
  };

  FundamentalMatrixGrid grid;
  grid.t0 = y.t0();
  grid.dt_grid = dt_store;
  grid.period = y.period();
  grid.store_per_sample = config.store_per_sample;
  grid.dt_int = dt_int;
  grid.matrices.reserve(n_nodes);
  grid.inverses.reserve(n_nodes);

  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(dim, dim);
  grid.matrices.push_back(phi);
  for (std::size_t j = 1; j < n_nodes; ++j) {
    const double t_start = grid.t0 + static_cast<double>(j - 1) * dt_store;
    phi = integrate_fixed(config.scheme, rhs, t_start, phi, dt_int,
                          steps_per_node);
    if (!phi.allFinite())
      throw IntegrationError("phi grid: non-finite state at node " +
                             std::to_string(j));
    grid.matrices.push_back(phi);
  }

  double worst_cond = 0.0;
  for (const auto& m : grid.matrices) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    Eigen::MatrixXd inv = lu.inverse();
    const double cond = m.norm() * inv.norm();
    worst_cond = std::max(worst_cond, cond);
    if (!(cond < config.condition_bound))
      throw ConditioningError("phi grid: node condition " +
                              std::to_string(cond) + " exceeds bound");
    grid.inverses.push_back(std::move(inv));
  }
  grid.max_condition = worst_cond;

  Eigen::EigenSolver<Eigen::MatrixXd> es(grid.monodromy(),
                                         /*computeEigenvectors=*/false);
  grid.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  return grid;
}

namespace {

std::size_t lookup_index(const FundamentalMatrixGrid& grid, double t) {
  const double span = grid.period;
  if (t < grid.t0 - 1e-12 * std::max(1.0, std::abs(grid.t0)) ||
      t > grid.t0 + span + 1e-12 * std::max(1.0, span))
    throw RangeError("phi lookup: t outside [t0, t0+T]");
  const double u = (t - grid.t0) / grid.dt_grid;
  auto j = static_cast<std::ptrdiff_t>(std::llround(u));
  j = std::max<std::ptrdiff_t>(
      0, std::min<std::ptrdiff_t>(j, static_cast<std::ptrdiff_t>(grid.nodes()) - 1));
  return static_cast<std::size_t>(j);
}

Eigen::MatrixXd lookup(const FundamentalMatrixGrid& grid,
                       const std::vector<Eigen::MatrixXd>& table, double t,
                       bool interpolate) {
  if (!interpolate) return table[lookup_index(grid, t)];
  const double u = (t - grid.t0) / grid.dt_grid;
  const auto lo = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor(u))));
  const std::size_t hi = std::min(lo + 1, grid.nodes() - 1);
  const double w = u - static_cast<double>(lo);
  return (1.0 - w) * table[lo] + w * table[hi];
}

}  // namespace

Eigen::MatrixXd phi_at(const FundamentalMatrixGrid& grid, double t) {
  lookup_index(grid, t);  // range check
  return lookup(grid, grid.matrices, t, false);
}

Eigen::MatrixXd phi_inv_at(const FundamentalMatrixGrid& grid, double t) {
  lookup_index(grid, t);
  return lookup(grid, grid.inverses, t, false);
}

void dump_phi_csv(const FundamentalMatrixGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write phi dump: " + path);
  out.precision(17);
  for (std::size_t j = 0; j < grid.nodes(); ++j) {
    out << grid.time_at(j);
    const auto& m = grid.matrices[j];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index k = 0; k < m.cols(); ++k) out << "," << m(i, k);
    out << "\n";
  }
}

}  // namespace perifit
