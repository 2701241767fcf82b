#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "perifit/errors.hpp"

namespace perifit {

enum class RkScheme {
  DormandPrince5,  ///< order-5 propagation weights, 6 stages per step
  ClassicRk4,
};

namespace detail {

inline bool finite_state(double x) { return std::isfinite(x); }

template <typename Derived>
bool finite_state(const Derived& x) {
  return x.allFinite();
}

}  // namespace detail

/// One fixed step of the selected explicit Runge-Kutta scheme.
/// State must support Eigen-style linear arithmetic (VectorXd, MatrixXd, ...).
template <typename State, typename Rhs>
State rk_step(RkScheme scheme, const Rhs& f, double t, const State& x,
              double h) {
  if (scheme == RkScheme::ClassicRk4) {
    State k1 = f(t, x);
    State k2 = f(t + 0.5 * h, State(x + 0.5 * h * k1));
    State k3 = f(t + 0.5 * h, State(x + 0.5 * h * k2));
    State k4 = f(t + h, State(x + h * k3));
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // Dormand-Prince 5(4) tableau, fifth-order solution only.
  constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                   c5 = 8.0 / 9.0;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                   a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;

  State k1 = f(t, x);
  State k2 = f(t + c2 * h, State(x + h * (a21 * k1)));
  State k3 = f(t + c3 * h, State(x + h * (a31 * k1 + a32 * k2)));
  State k4 = f(t + c4 * h, State(x + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  State k5 = f(t + c5 * h,
               State(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  State k6 = f(t + h, State(x + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                     a64 * k4 + a65 * k5)));
  return x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
}

/// Integrate x' = f(t, x) from t0 over n_steps fixed steps of size h.
/// `observer(step_index, t, x)` is called with the initial state (index 0)
/// and after every step. Throws IntegrationError on non-finite state.
template <typename State, typename Rhs, typename Observer>
State integrate_fixed(RkScheme scheme, const Rhs& f, double t0, State x,
                      double h, std::size_t n_steps, Observer&& observer) {
  observer(std::size_t{0}, t0, x);
  double t = t0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    x = rk_step(scheme, f, t, x, h);
    t = t0 + static_cast<double>(i + 1) * h;
    if (!detail::finite_state(x))
      throw IntegrationError("integration diverged at t=" + std::to_string(t));
    observer(i + 1, t, x);
  }
  return x;
}

template <typename State, typename Rhs>
State integrate_fixed(RkScheme scheme, const Rhs& f, double t0, State x,
                      double h, std::size_t n_steps) {
  return integrate_fixed(scheme, f, t0, std::move(x), h, n_steps,
                         [](std::size_t, double, const State&) {});
}

}  // namespace perifit
