#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "adiabatic/errors.hpp"
#include "adiabatic/numkit/hermitian.hpp"
#include "adiabatic/numkit/jet.hpp"
#include "adiabatic/numkit/ode.hpp"

// N-level system H(t) = H0 + x e^{eps t} V, written in the eigenbasis of H0,
// starting in the non-degenerate level `ground_index` at t = -inf.
//
// The state is represented as e^{-i E0 t} e^{-i G(t)} (|0> + |dpsi(t)>) with
// <0|dpsi> = 0 and G(t) = (1/eps) sum_n x^n e^{n eps t} xi_n / n. The xi_n and
// the corrections phi_n follow from a resolvent recursion; their eps
// dependence is carried as jets so the 1/eps, O(1) and O(eps) parts of G
// split cleanly.
namespace adiabatic::nstate {

using numkit::cplx;
using numkit::cvec;
using numkit::HermitianMatrix;
using numkit::Jet;

inline constexpr std::size_t kDefaultJetOrder = 2;
inline constexpr double kDefaultStartThreshold = 1e-8;
inline constexpr double kRealityTol = 1e-9;

class NStateModel {
public:
  /// gap_floor <= 0 selects 1e-8 times the spread of `energies`.
  NStateModel(std::vector<double> energies, HermitianMatrix v, double x, double eps,
              std::size_t ground_index = 0, double gap_floor = 0.0)
      : energies_(std::move(energies)), v_(std::move(v)), x_(x), eps_(eps), ground_(ground_index) {
    const std::size_t n = energies_.size();
    if (n == 0) throw DomainError("n-state model: no levels");
    if (v_.dim() != n) {
      throw DomainError("n-state model: V is " + std::to_string(v_.dim()) + "x" + std::to_string(v_.dim()) +
                        " but there are " + std::to_string(n) + " energies");
    }
    for (double e : energies_)
      if (!std::isfinite(e)) throw DomainError("n-state model: energies must be finite");
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("n-state model: x must be > 0");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("n-state model: eps must be > 0");
    if (ground_ >= n) throw DomainError("n-state model: ground_index out of range");

    const auto [lo, hi] = std::minmax_element(energies_.begin(), energies_.end());
    gap_floor_ = gap_floor > 0.0 ? gap_floor : 1e-8 * (*hi - *lo);
    min_gap_ = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == ground_) continue;
      const double gap = std::abs(energies_[k] - energies_[ground_]);
      if (!(gap >= gap_floor_) || gap == 0.0) {
        std::ostringstream os;
        os << "n-state model: level " << k << " (E = " << energies_[k] << ") is degenerate with tracked level "
           << ground_ << " (E = " << energies_[ground_] << "); gap " << gap << " < floor " << gap_floor_;
        throw DegeneracyError(os.str(), ground_, k);
      }
      min_gap_ = std::min(min_gap_, gap);
    }
  }

  std::size_t dim() const noexcept { return energies_.size(); }
  const std::vector<double>& energies() const noexcept { return energies_; }
  const HermitianMatrix& v() const noexcept { return v_; }
  double x() const noexcept { return x_; }
  double eps() const noexcept { return eps_; }
  std::size_t ground_index() const noexcept { return ground_; }
  double gap_floor() const noexcept { return gap_floor_; }
  /// Smallest |E_n - E_0| over n != 0.
  double min_gap() const noexcept { return min_gap_; }

  NStateModel with_x(double x) const { return {energies_, v_, x, eps_, ground_, gap_floor_}; }
  NStateModel with_eps(double eps) const { return {energies_, v_, x_, eps, ground_, gap_floor_}; }

  /// True when V has no imaginary entries.
  bool real_perturbation() const {
    for (const auto& z : v_.entries())
      if (z.imag() != 0.0) return false;
    return true;
  }

  HermitianMatrix h0() const { return HermitianMatrix::diagonal(energies_); }
  /// H0 + x V.
  HermitianMatrix full_hamiltonian() const { return h0().plus_scaled(x_, v_); }

private:
  std::vector<double> energies_;
  HermitianMatrix v_;
  double x_;
  double eps_;
  std::size_t ground_;
  double gap_floor_ = 0.0;
  double min_gap_ = 0.0;
};

/// Second-order Dyson expansion of the bracket in
/// |psi(t)> = e^{-i E0 t} { ... }, split by power of x.
struct DysonTerms {
  cvec order0;  // |0>
  cvec order1;  // coefficient of x
  cvec order2;  // coefficient of x^2
  cvec value;   // order0 + x order1 + x^2 order2
  double phase_energy = 0.0;  // E0, for the omitted global phase
};

inline DysonTerms dyson2(const NStateModel& model, double t) {
  const std::size_t n = model.dim();
  const std::size_t g = model.ground_index();
  const double eps = model.eps();
  const double e0 = model.energies()[g];
  const auto& v = model.v();
  const cplx I{0.0, 1.0};

  // i (E_k - E0) + j eps
  auto den = [&](std::size_t k, double j) { return I * (model.energies()[k] - e0) + j * eps; };

  DysonTerms out;
  out.phase_energy = e0;
  out.order0.assign(n, cplx{});
  out.order0[g] = 1.0;
  out.order1.assign(n, cplx{});
  out.order2.assign(n, cplx{});
  const double grow1 = std::exp(eps * t);
  const double grow2 = grow1 * grow1;
  for (std::size_t k = 0; k < n; ++k) {
    out.order1[k] = -I * grow1 * v(k, g) / den(k, 1.0);
    cplx acc{};
    for (std::size_t m = 0; m < n; ++m) acc += v(k, m) * v(m, g) / (den(k, 2.0) * den(m, 1.0));
    out.order2[k] = -grow2 * acc;
  }
  const double x = model.x();
  out.value.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.value[k] = out.order0[k] + x * out.order1[k] + x * x * out.order2[k];
  return out;
}

struct RsExpansion {
  std::vector<Jet> xi;               // xi[n-1] = xi_n
  std::vector<std::vector<Jet>> phi;  // phi[n-1][k] = <k|phi_n>
  std::size_t ground_index = 0;
  double base_eps = 0.0;

  std::size_t order() const noexcept { return xi.size(); }
  const Jet& xi_n(std::size_t n) const { return xi.at(n - 1); }

  /// Coefficient `jet_coeff` of <k|phi_n> for every k.
  cvec phi_n(std::size_t n, std::size_t jet_coeff = 0) const {
    const auto& p = phi.at(n - 1);
    cvec out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k][jet_coeff];
    return out;
  }
};

/// Resolvent recursion
///   phi_1 = -R_1 Q V |0>,
///   phi_n = -R_n [Q V phi_{n-1} - sum_{m<n} xi_{n-m} phi_m],
///   xi_1 = V_00,  xi_n = <0|V|phi_{n-1}>,
/// with R_n = 1 / ((H0 - E0) - i n eps) on the complement of |0>. eps is the
/// jet base_eps + h.
inline RsExpansion rs_recursion(const NStateModel& model, std::size_t order,
                                std::size_t jet_order = kDefaultJetOrder, double base_eps = 0.0) {
  if (order < 1) throw ContractError("rs_recursion: order must be >= 1");
  if (!(base_eps >= 0.0)) throw DomainError("rs_recursion: expansion point must be >= 0");
  const std::size_t n = model.dim();
  const std::size_t g = model.ground_index();
  const auto& v = model.v();
  const auto& e = model.energies();
  const cplx I{0.0, 1.0};
  const Jet eps = Jet::variable(jet_order, base_eps);

  RsExpansion out;
  out.ground_index = g;
  out.base_eps = base_eps;
  out.xi.reserve(order);
  out.phi.reserve(order);

  auto resolvent = [&](std::size_t k, std::size_t level) {
    const Jet den = Jet::constant(jet_order, e[k] - e[g]) - (I * static_cast<double>(level)) * eps;
    try {
      return recip(den);
    } catch (const SingularJetError&) {
      throw DegeneracyError("rs_recursion: vanishing resolvent denominator between levels " + std::to_string(g) +
                                " and " + std::to_string(k),
                            g, k);
    }
  };

  out.xi.push_back(Jet::constant(jet_order, v(g, g)));

  for (std::size_t level = 1; level <= order; ++level) {
    std::vector<Jet> next(n, Jet(jet_order));
    for (std::size_t k = 0; k < n; ++k) {
      if (k == g) continue;
      Jet src(jet_order);
      if (level == 1) {
        src = Jet::constant(jet_order, v(k, g));
      } else {
        const auto& prev = out.phi[level - 2];
        for (std::size_t j = 0; j < n; ++j)
          if (j != g) src += v(k, j) * prev[j];
        for (std::size_t m = 1; m < level; ++m) src -= out.xi[level - m - 1] * out.phi[m - 1][k];
      }
      next[k] = -(resolvent(k, level) * src);
    }
    out.phi.push_back(std::move(next));
    if (level < order) {
      Jet xi(jet_order);
      const auto& p = out.phi.back();
      for (std::size_t j = 0; j < n; ++j)
        if (j != g) xi += v(g, j) * p[j];
      out.xi.push_back(std::move(xi));
    }
  }
  return out;
}

struct GSplit {
  double g_a = 0.0;      // coefficient of the divergent phase 1/eps
  double delta_e = 0.0;  // level shift
  double g_b = 0.0;      // log-normalisation, Re G_b
  // Im G_b: a finite constant phase. Zero for real symmetric V; for complex
  // Hermitian V it is generally nonzero and is not a consistency failure.
  double g_b_phase = 0.0;
  std::size_t order = 0;
  double last_term_magnitude = 0.0;  // |x^N xi_N(0)|
  double max_imag_residue = 0.0;
};

namespace detail {

inline GSplit split_from(const RsExpansion& rs, double x, bool real_v) {
  const cplx I{0.0, 1.0};
  cplx ga{}, de{}, gb{};
  double xp = 1.0;
  double last = 0.0;
  for (std::size_t k = 1; k <= rs.order(); ++k) {
    xp *= x;
    const Jet& xi = rs.xi_n(k);
    ga += xp * xi[0] / static_cast<double>(k);
    de += xp * xi[0];
    gb += -I * (xp / static_cast<double>(k)) * xi[1];
    last = std::abs(xp * xi[0]);
  }
  GSplit out;
  out.order = rs.order();
  out.last_term_magnitude = last;
  out.max_imag_residue = std::max(std::abs(ga.imag()), std::abs(de.imag()));
  if (real_v) out.max_imag_residue = std::max(out.max_imag_residue, std::abs(gb.imag()));
  if (out.max_imag_residue > kRealityTol) {
    std::ostringstream os;
    os << "g_split: nominally real field has imaginary part " << out.max_imag_residue;
    throw ConsistencyError(os.str());
  }
  out.g_a = ga.real();
  out.delta_e = de.real();
  out.g_b = gb.real();
  out.g_b_phase = real_v ? 0.0 : gb.imag();
  return out;
}

}  // namespace detail

/// G(t) -> G_a / eps + dE t + i G_b as eps -> 0, from the recursion at eps = 0.
inline GSplit g_split(const NStateModel& model, std::size_t order, std::size_t jet_order = kDefaultJetOrder) {
  if (jet_order < 1) throw ContractError("g_split: jet order must be >= 1");
  return detail::split_from(rs_recursion(model, order, jet_order, 0.0), model.x(), model.real_perturbation());
}

struct AssembledState {
  cvec state;
  GSplit split;
};

/// e^{G_b} (|0> + sum_n x^n phi_n(eps = 0)), G_b including its phase. The divergent factor
/// e^{-i G_a / eps} and the phase e^{-i (E0 + dE) t} are left to the caller.
inline AssembledState assemble_state(const NStateModel& model, std::size_t order) {
  const auto rs = rs_recursion(model, order, kDefaultJetOrder, 0.0);
  AssembledState out;
  out.split = detail::split_from(rs, model.x(), model.real_perturbation());
  out.state.assign(model.dim(), cplx{});
  out.state[model.ground_index()] = 1.0;
  double xp = 1.0;
  for (std::size_t k = 1; k <= order; ++k) {
    xp *= model.x();
    const auto p = rs.phi_n(k);
    for (std::size_t i = 0; i < p.size(); ++i) out.state[i] += xp * p[i];
  }
  const cplx scale = std::exp(cplx{out.split.g_b, out.split.g_b_phase});
  for (auto& z : out.state) z *= scale;
  return out;
}

/// Time at which x e^{eps t} max|V_ij| / min_gap reaches `threshold`,
/// capped at t_end - 1.
inline double start_time(const NStateModel& model, double t_end, double threshold) {
  double vmax = 0.0;
  for (const auto& z : model.v().entries()) vmax = std::max(vmax, std::abs(z));
  if (vmax == 0.0 || model.dim() == 1) return t_end - 1.0;
  const double t0 = std::log(threshold * model.min_gap() / (model.x() * vmax)) / model.eps();
  return std::min(t0, t_end - 1.0);
}

/// Schroedinger-picture evolution i psi' = (H0 + x e^{eps t} V) psi from |0>.
inline numkit::Trajectory evolve_nstate(const NStateModel& model, double t_end, double tol,
                                        double start_threshold = kDefaultStartThreshold,
                                        bool record_steps = true,
                                        std::size_t max_steps = numkit::OdeOptions{}.max_steps) {
  if (!(tol > 0.0)) throw ContractError("evolve_nstate: tol must be > 0");
  if (!(start_threshold > 0.0 && start_threshold <= 1e-4)) {
    throw ContractError("evolve_nstate: start_threshold must lie in (0, 1e-4]");
  }
  const std::size_t n = model.dim();
  const auto& e = model.energies();
  const auto& v = model.v();
  const double x = model.x(), eps = model.eps();
  auto rhs = [&](double t, std::span<const cplx> y, std::span<cplx> dy) {
    const double lam = x * std::exp(eps * t);
    const cplx mi{0.0, -1.0};
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = e[i] * y[i];
      for (std::size_t j = 0; j < n; ++j) acc += lam * v(i, j) * y[j];
      dy[i] = mi * acc;
    }
  };
  cvec y0(n, cplx{});
  y0[model.ground_index()] = 1.0;
  numkit::OdeOptions opts;
  opts.tol = tol;
  opts.record_steps = record_steps;
  opts.max_steps = max_steps;
  return numkit::ode_evolve(rhs, std::move(y0), start_time(model, t_end, start_threshold), t_end, opts);
}

struct OracleShift {
  double shift = 0.0;    // lambda - E0
  double eigenvalue = 0.0;
  double overlap = 0.0;  // |<0|v>|^2 of the selected eigenvector
  std::size_t index = 0;
};

/// Exact shift of the level continuing |0>: diagonalise H0 + x V and pick the
/// eigenvector with the largest weight on |0>.
inline OracleShift oracle_shift_detail(const NStateModel& model) {
  const auto es = numkit::hermitian_eig(model.full_hamiltonian());
  const std::size_t g = model.ground_index();
  OracleShift out;
  double best = -1.0;
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    const double w = std::norm(es.vectors[k][g]);
    if (w > best) {
      best = w;
      out.index = k;
    }
  }
  out.overlap = best;
  if (best < 0.5) {
    std::ostringstream os;
    os << "oracle_shift: largest overlap with the tracked level is " << best
       << " < 0.5; coupling too strong to follow the level";
    throw ContinuationError(os.str());
  }
  out.eigenvalue = es.values[out.index];
  out.shift = out.eigenvalue - model.energies()[g];
  return out;
}

inline double oracle_shift(const NStateModel& model) { return oracle_shift_detail(model).shift; }

}  // namespace adiabatic::nstate
