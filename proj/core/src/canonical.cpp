#include "perifit/canonical.hpp"

#include <cmath>
#include <string>

#include "perifit/errors.hpp"

namespace perifit {

HurwitzCheck check_hurwitz(const Eigen::VectorXd& b, double eps_margin) {
  if (b.size() < 1) throw ValidationError("check_hurwitz: b must be nonempty");
  if (!b.allFinite()) throw ValidationError("check_hurwitz: b has non-finite entries");

  HurwitzCheck out;
  const auto deg = b.size() - 1;  // degree of s^{n-1} + b1 s^{n-2} + ...
  if (deg == 0) {
    out.ok = true;  // vacuous for n = 1
    return out;
  }

  // Companion matrix of the monic polynomial with coefficients b1..b_{n-1}.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(0, i) = -b(i + 1);

  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  out.ok = true;
  out.roots.reserve(static_cast<std::size_t>(deg));
  for (Eigen::Index i = 0; i < deg; ++i) {
    const std::complex<double> root = es.eigenvalues()(i);
    out.roots.push_back(root);
    if (!(root.real() < -eps_margin)) out.ok = false;
  }
  return out;
}

CanonicalForm::CanonicalForm(int n, int r, int k_lambda, Eigen::VectorXd b,
                             RegressorFn regressor,
                             NonlinearityFactory nonlinearity)
    : n_(n),
      r_(r),
      k_lambda_(k_lambda),
      b_(std::move(b)),
      regressor_(std::move(regressor)),
      nonlinearity_(std::move(nonlinearity)) {
  if (n_ < 1) throw ValidationError("canonical form: n must be >= 1");
  if (r_ < 1) throw ValidationError("canonical form: r must be >= 1");
  if (k_lambda_ < 0) throw ValidationError("canonical form: k_lambda must be >= 0");
  if (b_.size() != n_)
    throw ValidationError("canonical form: b must have length n");
  if (std::abs(b_(0) - 1.0) > 1e-12)
    throw ValidationError("canonical form: leading entry of b must be 1");
  if (!regressor_) throw ValidationError("canonical form: regressor required");
  if (!nonlinearity_) throw ValidationError("canonical form: nonlinearity required");
  auto hw = check_hurwitz(b_);
  if (!hw.ok)
    throw ValidationError("canonical form: filter polynomial of b is not Hurwitz");
}

Eigen::MatrixXd CanonicalForm::a0() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i + 1 < n_; ++i) a(i, i + 1) = 1.0;
  return a;
}

Eigen::VectorXd CanonicalForm::regressor(double y, double t) const {
  Eigen::VectorXd phi = regressor_(y, t);
  if (phi.size() != r_)
    throw ValidationError("regressor returned wrong length");
  if (!phi.allFinite())
    throw EvalError("regressor returned non-finite values", t);
  return phi;
}

NonlinearityFn CanonicalForm::prepare_nonlinearity(
    const Eigen::VectorXd& lambda, const SampledSignal& y) const {
  if (lambda.size() != k_lambda_)
    throw ValidationError("nonlinearity: lambda must have length k_lambda");
  return nonlinearity_(lambda, y);
}

Eigen::VectorXd CanonicalForm::nonlinearity(double y_value,
                                            const Eigen::VectorXd& lambda,
                                            const SampledSignal& y_signal,
                                            double t) const {
  auto g = prepare_nonlinearity(lambda, y_signal);
  Eigen::VectorXd v = g(y_value, t);
  if (v.size() != n_) throw ValidationError("nonlinearity returned wrong length");
  return v;
}

namespace {

// Integral of the quadratic through (0,f0), (h/2,fm), (h,f1) over [0, h/2].
inline double half_panel(double f0, double fm, double f1, double h) {
  return h * (5.0 * f0 + 8.0 * fm - f1) / 24.0;
}

// Simpson over the full panel [0, h].
inline double full_panel(double f0, double fm, double f1, double h) {
  return h * (f0 + 4.0 * fm + f1) / 6.0;
}

}  // namespace

AuxPeriodicSolution aux_state_closed_form(const AuxStateSpec& spec,
                                          const Eigen::VectorXd& lambda_bar,
                                          const SampledSignal& y,
                                          int substeps_per_sample) {
  if (spec.d < 1) throw ValidationError("aux state: d must be >= 1");
  if (!spec.alpha || !spec.w) throw ValidationError("aux state: alpha and w required");
  if (substeps_per_sample < 1)
    throw ValidationError("aux state: substeps_per_sample must be >= 1");

  const double T = y.period();
  const double t0 = y.t0();
  const auto m = static_cast<std::size_t>(y.size()) *
                 static_cast<std::size_t>(substeps_per_sample);
  const double h = T / static_cast<double>(m);
  const int d = spec.d;

  auto eval_alpha = [&](double t) {
    Eigen::VectorXd a = spec.alpha(y.eval(t), lambda_bar, t);
    if (a.size() != d) throw ValidationError("aux state: alpha returned wrong length");
    if (!a.allFinite()) throw EvalError("aux state: alpha non-finite", t);
    return a;
  };
  auto eval_w = [&](double t) {
    Eigen::VectorXd w = spec.w(y.eval(t), lambda_bar, t);
    if (w.size() != d) throw ValidationError("aux state: w returned wrong length");
    if (!w.allFinite()) throw EvalError("aux state: w non-finite", t);
    return w;
  };

  // Pass 1: prefix exponent integrals IA(t) = ∫_{t0}^t alpha, per component,
  // at every grid node and panel midpoint (Simpson per panel).
  Eigen::MatrixXd ia_node(d, m + 1), ia_mid(d, m);
  Eigen::MatrixXd alpha_node(d, m + 1), alpha_mid(d, m);
  Eigen::MatrixXd w_node(d, m + 1), w_mid(d, m);
  ia_node.col(0).setZero();
  alpha_node.col(0) = eval_alpha(t0);
  w_node.col(0) = eval_w(t0);
  for (std::size_t k = 0; k < m; ++k) {
    const double ta = t0 + static_cast<double>(k) * h;
    const double tm = ta + 0.5 * h;
    const double tb = t0 + static_cast<double>(k + 1) * h;
    alpha_mid.col(k) = eval_alpha(tm);
    alpha_node.col(k + 1) = eval_alpha(tb);
    w_mid.col(k) = eval_w(tm);
    w_node.col(k + 1) = eval_w(tb);
    for (int i = 0; i < d; ++i) {
      ia_mid(i, k) = ia_node(i, k) + half_panel(alpha_node(i, k),
                                                alpha_mid(i, k),
                                                alpha_node(i, k + 1), h);
      ia_node(i, k + 1) = ia_node(i, k) + full_panel(alpha_node(i, k),
                                                     alpha_mid(i, k),
                                                     alpha_node(i, k + 1), h);
    }
  }

  // Contraction over one period, componentwise.
  Eigen::VectorXd total_exponent = ia_node.col(m);
  for (int i = 0; i < d; ++i) {
    if (!(total_exponent(i) < 0.0))
      throw PeriodicityError(
          "aux state: contraction violated for component " + std::to_string(i) +
          " (∫ alpha = " + std::to_string(total_exponent(i)) + " >= 0)");
  }

  // Pass 2: running forced response J(t) = ∫_{t0}^t e^{IA(t)-IA(z)} w(z) dz,
  // accumulated panelwise so kernel exponents stay bounded by one panel.
  Eigen::MatrixXd j_run(d, m + 1);
  j_run.col(0).setZero();
  for (std::size_t k = 0; k < m; ++k) {
    for (int i = 0; i < d; ++i) {
      const double decay = std::exp(ia_node(i, k + 1) - ia_node(i, k));
      const double f0 = std::exp(ia_node(i, k + 1) - ia_node(i, k)) * w_node(i, k);
      const double fm = std::exp(ia_node(i, k + 1) - ia_mid(i, k)) * w_mid(i, k);
      const double f1 = w_node(i, k + 1);
      j_run(i, k + 1) = decay * j_run(i, k) + full_panel(f0, fm, f1, h);
    }
  }

  AuxPeriodicSolution out;
  out.q0.resize(d);
  for (int i = 0; i < d; ++i) {
    const double denom = 1.0 - std::exp(total_exponent(i));
    if (std::abs(denom) < 1e-12)
      throw ConditioningError("aux state: 1 - e^{∫ alpha} nearly singular");
    out.q0(i) = j_run(i, m) / denom;
  }

  out.q.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    std::vector<double> trace(m);
    for (std::size_t k = 0; k < m; ++k)
      trace[k] = std::exp(ia_node(i, k)) * out.q0(i) + j_run(i, k);
    out.q.emplace_back(std::move(trace), t0, T, y.interpolation());
  }
  return out;
}

}  // namespace perifit
