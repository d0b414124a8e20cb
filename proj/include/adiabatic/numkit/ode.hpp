#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "adiabatic/errors.hpp"
#include "adiabatic/numkit/hermitian.hpp"

namespace adiabatic::numkit {

struct Trajectory {
  std::vector<double> times;
  std::vector<cvec> states;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const cvec& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

struct OdeOptions {
  double tol = 1e-10;
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
  double beta = 0.04;  // PI controller memory exponent
  std::size_t max_steps = 50'000'000;
  /// Keep every accepted step in the trajectory; otherwise only the end points.
  bool record_steps = true;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
// b - b_hat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of a complex linear system
/// y' = rhs(t, y) from t0 to t1.
///
/// `rhs(t, y, dy)` writes the derivative into `dy`. The error of each step is
/// measured as an RMS over components scaled by tol * (1 + max|y|), and the
/// step size follows a PI controller with growth clamped to
/// [min_factor, max_factor].
template <class Rhs>
Trajectory ode_evolve(Rhs&& rhs, cvec y0, double t0, double t1, const OdeOptions& opts = {}) {
  using namespace detail;
  if (!(t0 < t1)) throw ContractError("ode_evolve: requires t0 < t1");
  if (!(opts.tol > 0.0)) throw ContractError("ode_evolve: tolerance must be positive");
  if (y0.empty()) throw ContractError("ode_evolve: empty initial state");

  const std::size_t n = y0.size();
  const double tol = opts.tol;
  cvec y = std::move(y0);
  cvec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

  auto scaled_rms = [&](std::span<const cplx> v, std::span<const cplx> ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = tol * (1.0 + std::abs(ref[i]));
      s += std::norm(v[i]) / (sc * sc);
    }
    return std::sqrt(s / static_cast<double>(n));
  };

  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(y);

  double t = t0;
  rhs(t, std::span<const cplx>(y), std::span<cplx>(k1));

  // Initial step guess (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    const double d0 = scaled_rms(y, y);
    const double d1 = scaled_rms(k1, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t1 - t0);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h0 * k1[i];
    rhs(t + h0, std::span<const cplx>(tmp), std::span<cplx>(k2));
    for (std::size_t i = 0; i < n; ++i) k3[i] = k2[i] - k1[i];
    const double d2 = scaled_rms(k3, y) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    h = std::min({100.0 * h0, h1, t1 - t0});
  }

  double err_prev = 1e-4;
  bool last_rejected = false;
  const double alpha = 0.2 - 0.75 * opts.beta;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > opts.max_steps) {
      throw IntegrationError("ode_evolve: step budget exhausted", t);
    }
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_floor) {
      throw IntegrationError("ode_evolve: step size underflow", t);
    }
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    auto stage = [&](std::span<cplx> out, double tc, auto&&... terms) {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (... + (terms.first * terms.second[i]));
      rhs(tc, std::span<const cplx>(tmp), out);
    };
    using P = std::pair<double, const cvec&>;
    stage(k2, t + c2 * h, P{a21, k1});
    stage(k3, t + c3 * h, P{a31, k1}, P{a32, k2});
    stage(k4, t + c4 * h, P{a41, k1}, P{a42, k2}, P{a43, k3});
    stage(k5, t + c5 * h, P{a51, k1}, P{a52, k2}, P{a53, k3}, P{a54, k4});
    stage(k6, t + h, P{a61, k1}, P{a62, k2}, P{a63, k3}, P{a64, k4}, P{a65, k5});
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double t_new = final_step ? t1 : t + h;
    rhs(t_new, std::span<const cplx>(ynew), std::span<cplx>(k7));

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
      err += std::norm(e) / (sc * sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (!std::isfinite(err)) {
      throw IntegrationError("ode_evolve: non-finite error estimate", t);
    }

    if (err <= 1.0) {
      double factor = err == 0.0 ? opts.max_factor
                                 : opts.safety * std::pow(err, -alpha) * std::pow(err_prev, opts.beta);
      factor = std::clamp(factor, opts.min_factor, opts.max_factor);
      if (last_rejected) factor = std::min(factor, 1.0);
      err_prev = std::max(err, 1e-4);
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      ++traj.accepted_steps;
      if (opts.record_steps || t >= t1) {
        traj.times.push_back(t);
        traj.states.push_back(y);
      }
      last_rejected = false;
      h *= factor;
    } else {
      const double factor = std::max(opts.min_factor, opts.safety * std::pow(err, -0.2));
      h *= factor;
      ++traj.rejected_steps;
      last_rejected = true;
    }
  }
  return traj;
}

}  // namespace adiabatic::numkit
