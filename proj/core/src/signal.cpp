#include "perifit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "perifit/errors.hpp"

namespace perifit {

SampledSignal::SampledSignal(std::vector<double> samples, double t0,
                             double period_T, Interpolation kind)
    : t0_(t0), period_(period_T), samples_(std::move(samples)), kind_(kind) {
  if (samples_.empty()) throw ValidationError("signal: samples must be nonempty");
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw ValidationError("signal: period_T must be positive and finite");
  if (!std::isfinite(t0_)) throw ValidationError("signal: t0 must be finite");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw ValidationError("signal: samples must be finite");
  }
  dt_ = period_ / static_cast<double>(samples_.size());
  if (kind_ == Interpolation::Cubic) build_spline();
}

void SampledSignal::build_spline() {
  // Periodic natural cubic spline: solve the cyclic tridiagonal system for
  // the second derivatives M_j,
  //   (h/6) M_{j-1} + (2h/3) M_j + (h/6) M_{j+1} = (y_{j+1} - 2 y_j + y_{j-1}) / h
  // with indices mod N.
  const auto n = static_cast<Eigen::Index>(samples_.size());
  second_deriv_.assign(samples_.size(), 0.0);
  if (n < 3) return;  // constant / two-point signals: fall back to M = 0

  const double h = dt_;
  const double diag = 2.0 * h / 3.0;
  const double off = h / 6.0;

  auto rhs_at = [&](Eigen::Index j) {
    const double ym = samples_[static_cast<std::size_t>((j + n - 1) % n)];
    const double y0 = samples_[static_cast<std::size_t>(j)];
    const double yp = samples_[static_cast<std::size_t>((j + 1) % n)];
    return (yp - 2.0 * y0 + ym) / h;
  };

  if (n < 5) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      a(j, j) += diag;
      a(j, (j + 1) % n) += off;
      a(j, (j + n - 1) % n) += off;
      rhs(j) = rhs_at(j);
    }
    Eigen::VectorXd m = a.partialPivLu().solve(rhs);
    for (Eigen::Index j = 0; j < n; ++j) second_deriv_[static_cast<std::size_t>(j)] = m(j);
    return;
  }

  // Sherman-Morrison: write the cyclic matrix as tridiagonal + u v^T.
  const double gamma = -diag;
  Eigen::VectorXd dvec = Eigen::VectorXd::Constant(n, diag);
  dvec(0) -= gamma;
  dvec(n - 1) -= off * off / gamma;

  auto thomas = [&](Eigen::VectorXd b) {
    Eigen::VectorXd c(n), x(n);
    c(0) = off / dvec(0);
    b(0) /= dvec(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      const double m = dvec(i) - off * c(i - 1);
      c(i) = off / m;
      b(i) = (b(i) - off * b(i - 1)) / m;
    }
    x(n - 1) = b(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = b(i) - c(i) * x(i + 1);
    return x;
  };

  Eigen::VectorXd rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) rhs(j) = rhs_at(j);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u(0) = gamma;
  u(n - 1) = off;

  Eigen::VectorXd y = thomas(rhs);
  Eigen::VectorXd z = thomas(u);
  const double vy = y(0) + (off / gamma) * y(n - 1);
  const double vz = z(0) + (off / gamma) * z(n - 1);
  Eigen::VectorXd m = y - (vy / (1.0 + vz)) * z;
  for (Eigen::Index j = 0; j < n; ++j) second_deriv_[static_cast<std::size_t>(j)] = m(j);
}

double SampledSignal::eval(double t) const {
  const auto n = static_cast<std::ptrdiff_t>(samples_.size());
  if (n == 1) return samples_[0];

  // Exact periodic reduction: fmod is exact in IEEE arithmetic, so t and
  // t + k*T land on the same in-period offset whenever the shifted argument
  // is exactly representable.
  double s = std::fmod(t - t0_, period_);
  if (s < 0.0) s += period_;
  if (s >= period_) s = 0.0;

  const double u = s / dt_;
  double fl = std::floor(u);
  double frac = u - fl;
  auto j = static_cast<std::ptrdiff_t>(fl);
  if (j >= n) {  // u == N from rounding at the wrap point
    j -= n;
    frac = 0.0;
  }
  const auto jn = static_cast<std::size_t>((j + 1 == n) ? 0 : j + 1);
  const auto j0 = static_cast<std::size_t>(j);

  const double a = 1.0 - frac;
  const double b = frac;
  const double y0 = samples_[j0];
  const double y1 = samples_[jn];
  if (kind_ == Interpolation::Linear || second_deriv_.empty() || n < 3)
    return a * y0 + b * y1;

  // Node-exact spline form: the curvature terms vanish identically at
  // frac = 0 and frac = 1.
  const double h2 = dt_ * dt_ / 6.0;
  const double m0 = second_deriv_[j0];
  const double m1 = second_deriv_[jn];
  return a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h2;
}

double SampledSignal::amplitude() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double SampledSignal::peak_to_peak() const {
  auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end());
  return *hi - *lo;
}

double SampledSignal::mean() const {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
         static_cast<double>(samples_.size());
}

SampledSignal make_signal(std::vector<double> samples, double t0,
                          double period_T, Interpolation kind) {
  return SampledSignal(std::move(samples), t0, period_T, kind);
}

SampledSignal load_signal_csv(const std::string& path, Interpolation kind) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open signal CSV: " + path);

  std::vector<double> times, values;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t = 0.0, y = 0.0;
    if (!(ss >> t >> y)) {
      if (first) {  // tolerate a single header row
        first = false;
        continue;
      }
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected two numeric columns t,y");
    }
    first = false;
    times.push_back(t);
    values.push_back(y);
  }
  if (times.size() < 2)
    throw ValidationError(path + ": need at least two data rows");

  const double dt0 = times[1] - times[0];
  if (!(dt0 > 0.0))
    throw ValidationError(path + ": time column must be strictly increasing");
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double d = times[i + 1] - times[i];
    if (std::abs(d - dt0) > 1e-9 * std::max(std::abs(dt0), 1.0))
      throw ValidationError(path + ": non-uniform sampling at row " +
                            std::to_string(i + 2));
  }
  const auto n = static_cast<double>(times.size());
  const double dt = (times.back() - times.front()) / (n - 1.0);
  return SampledSignal(std::move(values), times.front(), n * dt, kind);
}

void save_signal_csv(const SampledSignal& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write signal CSV: " + path);
  out << "t,y\n";
  out.precision(17);
  for (std::size_t j = 0; j < s.size(); ++j) {
    out << s.t0() + static_cast<double>(j) * s.dt() << "," << s.samples()[j]
        << "\n";
  }
}

}  // namespace perifit
