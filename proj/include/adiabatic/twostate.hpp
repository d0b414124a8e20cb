#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "adiabatic/errors.hpp"
#include "adiabatic/numkit/hermitian.hpp"
#include "adiabatic/numkit/jet.hpp"
#include "adiabatic/numkit/ode.hpp"

// Two-level system H(t) = H0 + x e^{eps t} V with H0 = diag(mu - delta,
// mu + delta) and V = sigma_x, switched on adiabatically from t = -inf.
//
// Three routes to the interaction-picture amplitude a(t) of the initial level
// live here: direct ODE integration, the (divergent as eps -> 0) Bessel
// power series, and the phase representation a = exp(-i f / eps) whose
// coefficients come from a quadratic recursion. The phase route separates
// the 1/eps divergence into a constant phase, leaving a finite limit state.
namespace adiabatic::twostate {

using numkit::cplx;
using numkit::cvec;
using numkit::Jet;

inline constexpr std::size_t kDefaultOrder = 30;
inline constexpr std::size_t kDefaultJetOrder = 2;
inline constexpr double kDefaultStartThreshold = 1e-8;

class TwoStateModel {
public:
  TwoStateModel(double mu, double delta, double x, double eps) : mu_(mu), delta_(delta), x_(x), eps_(eps) {
    if (!std::isfinite(mu)) throw DomainError("two-state model: mu must be finite");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("two-state model: delta must be > 0");
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("two-state model: x must be > 0");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("two-state model: eps must be > 0");
  }

  double mu() const noexcept { return mu_; }
  double delta() const noexcept { return delta_; }
  double x() const noexcept { return x_; }
  double eps() const noexcept { return eps_; }

  TwoStateModel with_eps(double eps) const { return {mu_, delta_, x_, eps}; }
  TwoStateModel with_x(double x) const { return {mu_, delta_, x, eps_}; }

private:
  double mu_, delta_, x_, eps_;
};

/// Throws DomainError unless 0 < x < delta; the x power series of the level
/// shift has its branch points at x = +-i delta.
inline void require_series_domain(double delta, double x) {
  if (!(x < delta)) {
    std::ostringstream os;
    os << "series in x requires x < delta (radius of convergence); got x = " << x << ", delta = " << delta;
    throw DomainError(os.str());
  }
}

/// The 2x2 matrix H0 + x V.
inline numkit::HermitianMatrix hamiltonian(const TwoStateModel& m) {
  return numkit::HermitianMatrix(
      2, {cplx{m.mu() - m.delta()}, cplx{m.x()}, cplx{m.x()}, cplx{m.mu() + m.delta()}});
}

/// delta - sqrt(delta^2 + x^2), the shift of the lower level. Never positive.
inline double delta_e_closed(double delta, double x) {
  if (!(delta > 0.0)) throw DomainError("delta_e_closed: delta must be > 0");
  if (!(x >= 0.0)) throw DomainError("delta_e_closed: x must be >= 0");
  // Rationalised form avoids cancellation for x << delta.
  return -x * x / (delta + std::hypot(delta, x));
}

/// 1 / sqrt(1 + (dE/x)^2), the normalisation of the perturbed lower level.
inline double norm_factor(double delta, double x) {
  if (x == 0.0) return 1.0;
  const double r = delta_e_closed(delta, x) / x;
  return 1.0 / std::sqrt(1.0 + r * r);
}

struct TwoStateEigensystem {
  std::array<cplx, 2> psi0;
  double e0;
  std::array<cplx, 2> psi1;
  double e1;
  double delta_e;
  double norm_n;
};

inline TwoStateEigensystem exact_eigensystem(const TwoStateModel& m) {
  const double de = delta_e_closed(m.delta(), m.x());
  const double nn = norm_factor(m.delta(), m.x());
  const double ratio = de / m.x();
  TwoStateEigensystem out;
  out.delta_e = de;
  out.norm_n = nn;
  out.e0 = (m.mu() - m.delta()) - std::abs(de);
  out.e1 = (m.mu() + m.delta()) + std::abs(de);
  out.psi0 = {cplx{nn}, cplx{nn * ratio}};
  out.psi1 = {cplx{-nn * ratio}, cplx{nn}};
  return out;
}

/// Coefficients of the phase-generator expansion g(lambda) = sum lambda^{2n} gt_n(eps),
/// each held as a jet in eps about `base_eps`.
struct GtildeTable {
  std::vector<Jet> entries;  // entries[n-1] is gt_n
  double delta = 0.0;
  double base_eps = 0.0;

  std::size_t order() const noexcept { return entries.size(); }
  const Jet& operator()(std::size_t n) const { return entries.at(n - 1); }
};

/// Runs gt_1 = -i / (2i delta + eps),
///      gt_n = i sum_{m=1}^{n-1} gt_{n-m} gt_m / (2i delta + (2n-1) eps)
/// with eps carried as the jet base_eps + h.
inline GtildeTable gtilde_table(double delta, std::size_t order, std::size_t jet_order = kDefaultJetOrder,
                                double base_eps = 0.0) {
  if (!(delta > 0.0)) throw DomainError("gtilde_table: delta must be > 0");
  if (order < 1) throw ContractError("gtilde_table: order must be >= 1");
  if (jet_order < 1) throw ContractError("gtilde_table: jet order must be >= 1");
  if (!(base_eps >= 0.0)) throw DomainError("gtilde_table: expansion point must be >= 0");

  const cplx I{0.0, 1.0};
  const Jet eps = Jet::variable(jet_order, base_eps);
  const Jet two_i_delta = Jet::constant(jet_order, 2.0 * I * delta);

  GtildeTable table;
  table.delta = delta;
  table.base_eps = base_eps;
  table.entries.reserve(order);
  table.entries.push_back(-I * recip(two_i_delta + eps));
  for (std::size_t n = 2; n <= order; ++n) {
    Jet conv(jet_order);
    for (std::size_t k = 1; k < n; ++k) conv += table.entries[n - k - 1] * table.entries[k - 1];
    const Jet denom = two_i_delta + eps * static_cast<double>(2 * n - 1);
    table.entries.push_back(I * conv * recip(denom));
  }
  return table;
}

struct SeriesSum {
  std::vector<double> partial_sums;
  double value = 0.0;
};

/// Partial sums of dE = sum_n x^{2n} gt_n(0).
inline SeriesSum delta_e_series(double delta, double x, std::size_t order = kDefaultOrder) {
  if (!(x > 0.0)) throw DomainError("delta_e_series: x must be > 0");
  require_series_domain(delta, x);
  const auto table = gtilde_table(delta, order, 1);
  SeriesSum out;
  out.partial_sums.reserve(order);
  const double x2 = x * x;
  double xp = 1.0;
  double acc = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    xp *= x2;
    acc += xp * table(n).value().real();
    out.partial_sums.push_back(acc);
  }
  out.value = acc;
  return out;
}

struct BesselSeries {
  cplx value;
  std::vector<double> term_magnitudes;  // |term_k|, k = 1..terms used
  double max_term = 0.0;
  bool converged = false;
  bool overflow = false;
};

/// a(t) = 1 + sum_{k>=1} (-s^2/4)^k / (k! prod_{j<=k} (j - nu)), with
/// s = x e^{eps t} / eps and nu = 1/2 - i delta / eps.
///
/// Terms come from the ratio term_k / term_{k-1} = (-s^2/4) / (k (k - nu)).
/// Summation stops after `terms` terms, or earlier once a term falls below
/// `stop_below` (if positive). A non-finite term stops the sum and sets
/// `overflow`; the partial data is still returned.
inline BesselSeries bessel_series_a(const TwoStateModel& m, double t, std::size_t terms,
                                    double stop_below = 0.0) {
  if (terms < 1) throw ContractError("bessel_series_a: need at least one term");
  const double s = m.x() * std::exp(m.eps() * t) / m.eps();
  const cplx nu{0.5, -m.delta() / m.eps()};
  const cplx z = -s * s / 4.0;

  BesselSeries out;
  cplx sum{1.0};
  cplx term{1.0};
  for (std::size_t k = 1; k <= terms; ++k) {
    term *= z / (static_cast<double>(k) * (static_cast<double>(k) - nu));
    const double mag = std::abs(term);
    if (!std::isfinite(mag)) {
      out.overflow = true;
      break;
    }
    out.term_magnitudes.push_back(mag);
    out.max_term = std::max(out.max_term, mag);
    sum += term;
    if (stop_below > 0.0 && mag < stop_below) break;
  }
  out.value = sum;
  const double last = out.term_magnitudes.empty() ? 0.0 : out.term_magnitudes.back();
  out.converged = !out.overflow && last < 1e-12 * std::max(1.0, std::abs(sum));
  return out;
}

/// f(t, eps) = sum_{n<=order} x^{2n} e^{2n eps t} gt_n(eps) / (2n), with the
/// coefficients evaluated exactly at the model's eps.
inline cplx phase_f(const TwoStateModel& m, double t, std::size_t order = kDefaultOrder) {
  if (order < 1) throw ContractError("phase_f: order must be >= 1");
  const auto table = gtilde_table(m.delta(), order, 1, m.eps());
  const double lam2 = m.x() * m.x() * std::exp(2.0 * m.eps() * t);
  double lp = 1.0;
  cplx acc{};
  for (std::size_t n = 1; n <= order; ++n) {
    lp *= lam2;
    acc += lp * table(n).value() / (2.0 * static_cast<double>(n));
  }
  return acc;
}

/// a(t) reconstructed as exp(-i f(t, eps) / eps).
inline cplx phase_recursion_a(const TwoStateModel& m, double t, std::size_t order = kDefaultOrder) {
  return std::exp(cplx{0.0, -1.0} * phase_f(m, t, order) / m.eps());
}

struct PhaseSplitTwoState {
  double f_a = 0.0;        // coefficient of the divergent phase 1/eps
  double delta_e_a = 0.0;  // secular energy
  double f_b = 0.0;        // log-magnitude of the limit amplitude
  cplx f_c{};              // remainder at (t=0, eps_used), exact coefficients
  cplx f_c_leading{};      // eps * sum x^{2n}/(2n) * (2nd jet coefficient)
  double max_imag_residue = 0.0;
  std::size_t truncation_order = 0;
  double eps_used = 0.0;
};

/// Imaginary parts above this abort phase_split.
inline constexpr double kRealityTol = 1e-8;

inline PhaseSplitTwoState phase_split(const TwoStateModel& m, std::size_t order = kDefaultOrder,
                                      std::size_t jet_order = kDefaultJetOrder) {
  if (order < 1) throw ContractError("phase_split: order must be >= 1");
  require_series_domain(m.delta(), m.x());
  const cplx I{0.0, 1.0};
  const auto at_zero = gtilde_table(m.delta(), order, jet_order, 0.0);
  const auto at_eps = gtilde_table(m.delta(), order, 1, m.eps());

  cplx fa{}, dea{}, fb{}, fc{}, fc_lead{};
  const double x2 = m.x() * m.x();
  double xp = 1.0;
  for (std::size_t n = 1; n <= order; ++n) {
    xp *= x2;
    const double w = xp / (2.0 * static_cast<double>(n));
    const Jet& g = at_zero(n);
    fa += w * g[0];
    dea += xp * g[0];
    fb += -I * w * g[1];
    fc += w * ((at_eps(n).value() - g[0]) / m.eps() - g[1]);
    if (jet_order >= 2) fc_lead += w * m.eps() * g[2];
  }

  PhaseSplitTwoState out;
  out.max_imag_residue = std::max({std::abs(fa.imag()), std::abs(dea.imag()), std::abs(fb.imag())});
  if (out.max_imag_residue > kRealityTol) {
    std::ostringstream os;
    os << "phase_split: nominally real field has imaginary part " << out.max_imag_residue;
    throw ConsistencyError(os.str());
  }
  out.f_a = fa.real();
  out.delta_e_a = dea.real();
  out.f_b = fb.real();
  out.f_c = fc;
  out.f_c_leading = fc_lead;
  out.truncation_order = order;
  out.eps_used = m.eps();
  return out;
}

struct FbIdentity {
  double lhs = 0.0;       // exp(F_b) from the series
  double rhs = 0.0;       // 1 / sqrt(1 + (dE/x)^2), closed form
  double residual = 0.0;  // |lhs - rhs|
  double quadratic_residual = 0.0;  // -dE^2 + 2 delta dE + x^2 with the series dE
  double balance_residual = 0.0;    // 2x F_b'(x)(delta - dE) + (dE - x dE'(x))
};

/// Checks exp(F_b) against the closed-form normalisation and the two
/// relations obtained by matching eps^0 and eps^1 in the Riccati equation at
/// t = 0. x-derivatives are central differences.
inline FbIdentity fb_identity_check(double delta, double x, std::size_t order = kDefaultOrder) {
  if (!(x > 0.0)) throw DomainError("fb_identity_check: x must be > 0");
  require_series_domain(delta, x);
  const double eps_unused = 1.0;
  auto fb_at = [&](double xv) { return phase_split(TwoStateModel(0.0, delta, xv, eps_unused), order).f_b; };

  FbIdentity out;
  const auto split = phase_split(TwoStateModel(0.0, delta, x, eps_unused), order);
  out.lhs = std::exp(split.f_b);
  out.rhs = norm_factor(delta, x);
  out.residual = std::abs(out.lhs - out.rhs);

  const double de = split.delta_e_a;
  out.quadratic_residual = -de * de + 2.0 * delta * de + x * x;

  const double h = 1e-5 * std::min(x, delta - x);
  const double dfb = (fb_at(x + h) - fb_at(x - h)) / (2.0 * h);
  const double dde = (delta_e_closed(delta, x + h) - delta_e_closed(delta, x - h)) / (2.0 * h);
  out.balance_residual = 2.0 * x * dfb * (delta - de) + (de - x * dde);
  return out;
}

/// Time at which the coupling x e^{eps t} / (2 delta) equals `threshold`,
/// capped at t_end - 1.
inline double start_time(const TwoStateModel& m, double t_end, double threshold) {
  const double t0 = std::log(2.0 * m.delta() * threshold / m.x()) / m.eps();
  return std::min(t0, t_end - 1.0);
}

/// Integrates the interaction-picture pair (a, c):
///   a' = -i x e^{eps t} e^{-2i delta t} c,   c' = -i x e^{eps t} e^{+2i delta t} a,
/// from (1, 0) at start_time() to t_end.
inline numkit::Trajectory evolve_two_state(const TwoStateModel& m, double t_end, double tol,
                                           double start_threshold = kDefaultStartThreshold,
                                           bool record_steps = true,
                                           std::size_t max_steps = numkit::OdeOptions{}.max_steps) {
  if (!(tol > 0.0)) throw ContractError("evolve_two_state: tol must be > 0");
  if (!(start_threshold > 0.0 && start_threshold <= 1e-4)) {
    throw ContractError("evolve_two_state: start_threshold must lie in (0, 1e-4]");
  }
  const double x = m.x(), eps = m.eps(), two_delta = 2.0 * m.delta();
  auto rhs = [=](double t, std::span<const cplx> y, std::span<cplx> dy) {
    const double lam = x * std::exp(eps * t);
    const cplx rot = std::polar(1.0, two_delta * t);
    const cplx mi{0.0, -1.0};
    dy[0] = mi * lam * std::conj(rot) * y[1];
    dy[1] = mi * lam * rot * y[0];
  };
  numkit::OdeOptions opts;
  opts.tol = tol;
  opts.record_steps = record_steps;
  opts.max_steps = max_steps;
  return numkit::ode_evolve(rhs, cvec{1.0, 0.0}, start_time(m, t_end, start_threshold), t_end, opts);
}

struct LimitState {
  std::array<cplx, 2> state;
  double secular_phase = 0.0;          // dE * t
  double divergent_coefficient = 0.0;  // F_a; the dropped factor is exp(-i F_a / eps)
  double delta_e = 0.0;
  double norm = 0.0;                   // exp(F_b)
};

/// eps -> 0 limit of the Schroedinger-picture state with the divergent
/// constant phase removed:
///   e^{-i(mu - delta) t} e^{-i dE t} e^{F_b} (Y0 + (dE/x) Y1).
inline LimitState limit_state(const TwoStateModel& m, double t, std::size_t order = kDefaultOrder) {
  const auto split = phase_split(m, order);
  LimitState out;
  out.delta_e = split.delta_e_a;
  out.norm = std::exp(split.f_b);
  out.divergent_coefficient = split.f_a;
  out.secular_phase = split.delta_e_a * t;
  const cplx phase = std::polar(1.0, -((m.mu() - m.delta()) * t + out.secular_phase));
  out.state = {phase * out.norm, phase * out.norm * (split.delta_e_a / m.x())};
  return out;
}

}  // namespace adiabatic::twostate
