#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace perifit {

enum class Interpolation {
  Cubic,   ///< periodic cubic spline (default)
  Linear,  ///< piecewise linear
};

/// Uniformly sampled T-periodic scalar signal.
///
/// Holds N samples y_j = y(t0 + j*dt) with dt = T/N; sample j covers one
/// period [t0, t0+T). Evaluation at arbitrary t first reduces t into the
/// base period (exact fmod reduction, then integer index wrap, so there is
/// no drift for large |t|) and then evaluates the interpolant. Instances
/// are immutable after construction and safe for concurrent reads.
class SampledSignal {
 public:
  SampledSignal(std::vector<double> samples, double t0, double period_T,
                Interpolation kind = Interpolation::Cubic);

  double t0() const noexcept { return t0_; }
  double period() const noexcept { return period_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return samples_.size(); }
  Interpolation interpolation() const noexcept { return kind_; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  /// Value of the periodic interpolant at any real t.
  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  /// Largest |sample|; handy for relative tolerances.
  double amplitude() const;
  /// max(samples) - min(samples).
  double peak_to_peak() const;
  /// Mean of the stored samples.
  double mean() const;

 private:
  double t0_ = 0.0;
  double period_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> samples_;
  std::vector<double> second_deriv_;  // spline curvature at nodes (cubic mode)
  Interpolation kind_ = Interpolation::Cubic;

  void build_spline();
};

SampledSignal make_signal(std::vector<double> samples, double t0,
                          double period_T,
                          Interpolation kind = Interpolation::Cubic);

/// Load a `t,y` CSV covering exactly one period. Header row optional. The
/// time column must be strictly increasing and uniform within 1e-9 relative;
/// the period is N*dt.
SampledSignal load_signal_csv(const std::string& path,
                              Interpolation kind = Interpolation::Cubic);

void save_signal_csv(const SampledSignal& s, const std::string& path);

}  // namespace perifit
