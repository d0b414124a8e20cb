#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "adiabatic/numkit/hermitian.hpp"
#include "adiabatic/twostate.hpp"
#include "oracles.hpp"

using namespace adiabatic;
using namespace adiabatic::twostate;
using numkit::cplx;

namespace {

constexpr cplx I{0.0, 1.0};

// Closed forms evaluated directly in the test.
double shift(double delta, double x) { return delta - std::sqrt(delta * delta + x * x); }
double norm_n(double delta, double x) {
  const double r = shift(delta, x) / x;
  return 1.0 / std::sqrt(1.0 + r * r);
}

}  // namespace

TEST(TwoStateModel, RejectsNonPositiveParameters) {
  EXPECT_THROW(TwoStateModel(0.0, 1.0, 0.0, 0.25), DomainError);
  EXPECT_THROW(TwoStateModel(0.0, 0.0, 0.5, 0.25), DomainError);
  EXPECT_THROW(TwoStateModel(0.0, 1.0, 0.5, -0.1), DomainError);
}

// ---- exact eigensystem ------------------------------------------------------

TEST(ExactEigensystem, SmallCouplingLimit) {
  const auto es = exact_eigensystem(TwoStateModel(0.3, 1.0, 1e-9, 0.25));
  EXPECT_NEAR(std::abs(es.psi0[0] - 1.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(es.psi0[1]), 0.0, 1e-9);
  EXPECT_NEAR(es.e0, 0.3 - 1.0, 1e-15);
}

TEST(ExactEigensystem, ReferencePoint) {
  const auto es = exact_eigensystem(TwoStateModel(0.0, 1.0, 0.5, 0.25));
  EXPECT_NEAR(es.delta_e, 1.0 - std::sqrt(1.25), 1e-15);
  EXPECT_NEAR(es.delta_e, -0.1180339887, 1e-10);
  EXPECT_NEAR(es.e0, -0.5 * std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(es.e0, -1.1180339887, 1e-10);
}

TEST(ExactEigensystem, AgreesWithEigensolverAndIsEigenvector) {
  for (double mu : {-0.7, 0.0, 2.0}) {
    for (double delta : {0.5, 1.0, 3.0}) {
      for (double x : {0.1, 0.5, 2.0, 7.0}) {
        const TwoStateModel m(mu, delta, x, 0.25);
        const auto es = exact_eigensystem(m);
        const auto h = hamiltonian(m);
        const auto num = numkit::hermitian_eig(h);
        EXPECT_NEAR(num.values[0], es.e0, 1e-10);
        EXPECT_NEAR(num.values[1], es.e1, 1e-10);
        const auto [lo, hi] = oracles::eig2(mu - delta, x, mu + delta);
        EXPECT_NEAR(es.e0, lo, 1e-12);
        EXPECT_NEAR(es.e1, hi, 1e-12);
        const auto hv = h.apply(numkit::cvec{es.psi0[0], es.psi0[1]});
        EXPECT_NEAR(std::abs(hv[0] - es.e0 * es.psi0[0]), 0.0, 1e-12 * (1 + std::abs(es.e0)));
        EXPECT_NEAR(std::abs(hv[1] - es.e0 * es.psi0[1]), 0.0, 1e-12 * (1 + std::abs(es.e0)));
        EXPECT_NEAR(std::norm(es.psi0[0]) + std::norm(es.psi0[1]), 1.0, 1e-14);
      }
    }
  }
}

TEST(DeltaEClosed, Examples) {
  EXPECT_EQ(delta_e_closed(1.0, 0.0), 0.0);
  EXPECT_NEAR(delta_e_closed(1.0, 0.5), -0.1180339887, 1e-10);
  EXPECT_NEAR(delta_e_closed(3.0, 4.0), -2.0, 1e-15);
  // Hermitian-eigensolver ground energy minus (mu - delta).
  const auto num = numkit::hermitian_eig(hamiltonian(TwoStateModel(0.0, 1.0, 0.5, 0.1)));
  EXPECT_NEAR(delta_e_closed(1.0, 0.5), num.values[0] - (0.0 - 1.0), 1e-12);
}

// ---- g-tilde recursion ------------------------------------------------------

TEST(GtildeTable, LowOrderValues) {
  const auto t = gtilde_table(1.0, 3, 2);
  EXPECT_NEAR(std::abs(t(1)[0] - (-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t(2)[0] - 0.125), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t(3)[0] - (-0.0625)), 0.0, 1e-15);
  // d/d eps of -i/(2i + eps) at 0 is i/(2i)^2.
  EXPECT_NEAR(std::abs(t(1)[1] - (-0.25 * I)), 0.0, 1e-15);
}

TEST(GtildeTable, GeneralDeltaFirstDerivative) {
  for (double delta : {0.5, 2.0}) {
    const auto t = gtilde_table(delta, 1, 2);
    EXPECT_NEAR(std::abs(t(1)[0] - (-1.0 / (2.0 * delta))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t(1)[1] - (-I / (4.0 * delta * delta))), 0.0, 1e-15);
    // Second Taylor coefficient of -i/(2i delta + e): -i/(2i delta)^3.
    EXPECT_NEAR(std::abs(t(1)[2] - (-I / std::pow(2.0 * I * delta, 3))), 0.0, 1e-15);
  }
}

TEST(GtildeTable, MatchesBinomialCoefficientsOfShift) {
  for (double delta : {1.0, 0.7, 2.5}) {
    const auto t = gtilde_table(delta, 10, 1);
    for (int n = 1; n <= 10; ++n) {
      const double ref = oracles::sqrt_shift_coefficient(delta, n);
      EXPECT_NEAR(t(n)[0].real(), ref, 1e-10 * std::abs(ref)) << "n = " << n;
      EXPECT_EQ(t(n)[0].imag(), 0.0);
    }
  }
}

TEST(GtildeTable, ExpansionPointValueMatchesScalarRecursion) {
  // Scalar evaluation of the same recursion at finite eps.
  const double delta = 1.0, eps = 0.3;
  std::vector<cplx> g{-I / (2.0 * I * delta + eps)};
  for (int n = 2; n <= 12; ++n) {
    cplx s{};
    for (int m = 1; m < n; ++m) s += g[n - m - 1] * g[m - 1];
    g.push_back(I * s / (2.0 * I * delta + (2.0 * n - 1.0) * eps));
  }
  const auto t = gtilde_table(delta, 12, 2, eps);
  for (int n = 1; n <= 12; ++n) EXPECT_NEAR(std::abs(t(n).value() - g[n - 1]), 0.0, 1e-15 * std::abs(g[n - 1]) + 1e-18);
}

TEST(GtildeTable, JetCoefficientsMatchFiniteDifferences) {
  const double delta = 1.0, h = 1e-4;
  const auto t0 = gtilde_table(delta, 6, 2, 0.2);
  const auto tp = gtilde_table(delta, 6, 1, 0.2 + h);
  const auto tm = gtilde_table(delta, 6, 1, 0.2 - h);
  for (int n = 1; n <= 6; ++n) {
    const cplx d1 = (tp(n).value() - tm(n).value()) / (2.0 * h);
    const cplx d2 = (tp(n).value() - 2.0 * t0(n).value() + tm(n).value()) / (h * h);
    EXPECT_NEAR(std::abs(t0(n)[1] - d1), 0.0, 1e-7);
    EXPECT_NEAR(std::abs(2.0 * t0(n)[2] - d2), 0.0, 1e-5);
  }
}

// ---- delta_e series ----------------------------------------------------------

TEST(DeltaESeries, MatchesClosedForm) {
  const auto s = delta_e_series(1.0, 0.5, 30);
  EXPECT_EQ(s.partial_sums.size(), 30u);
  EXPECT_NEAR(s.value, shift(1.0, 0.5), 1e-10);
  EXPECT_NEAR(s.value, -0.1180339887, 1e-10);
}

TEST(DeltaESeries, LeadingTerm) {
  for (double x : {1e-3, 1e-4}) {
    const auto s = delta_e_series(1.0, x, 1);
    EXPECT_NEAR(s.value, -x * x / 2.0, 1e-18);
    EXPECT_NEAR(delta_e_series(1.0, x, 30).value, shift(1.0, x), 1e-16);
  }
}

TEST(DeltaESeries, OutsideRadiusIsDomainError) {
  EXPECT_THROW(delta_e_series(1.0, 1.0, 30), DomainError);
  EXPECT_THROW(delta_e_series(1.0, 1.5, 30), DomainError);
  try {
    delta_e_series(1.0, 1.2, 30);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("radius"), std::string::npos);
  }
}

TEST(DeltaESeries, SatisfiesQuadratic) {
  for (double delta : {0.5, 1.0, 2.0}) {
    for (double ratio : {0.1, 0.3, 0.5, 0.7, 0.8}) {
      const double x = ratio * delta;
      // Order large enough that (x/delta)^{2N} is below double precision.
      const double de = delta_e_series(delta, x, 200).value;
      EXPECT_LE(std::abs(-de * de + 2.0 * delta * de + x * x), 1e-9) << delta << " " << x;
    }
  }
}

// ---- Bessel series -----------------------------------------------------------

TEST(BesselSeries, VanishingCoupling) {
  const auto b = bessel_series_a(TwoStateModel(0.0, 1.0, 1e-12, 0.25), 0.0, 10);
  EXPECT_NEAR(std::abs(b.value - 1.0), 0.0, 1e-20);
  for (double m : b.term_magnitudes) EXPECT_LT(m, 1e-20);
  EXPECT_TRUE(b.converged);
}

TEST(BesselSeries, OverflowIsFlaggedNotThrown) {
  const auto b = bessel_series_a(TwoStateModel(0.0, 1.0, 0.5, 5e-5), 0.0, 5000);
  EXPECT_FALSE(b.converged);
  EXPECT_TRUE(b.overflow);
  EXPECT_FALSE(b.term_magnitudes.empty());
}

TEST(ThreeWayAgreement, OdeBesselPhaseRecursion) {
  for (double eps : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (double x : {0.25, 0.5}) {
      const TwoStateModel m(0.0, 1.0, x, eps);
      for (double t : {-2.0, -1.0, 0.0}) {
        const auto b = bessel_series_a(m, t, 60, 1e-12);
        const cplx ph = phase_recursion_a(m, t);
        const cplx ode = evolve_two_state(m, t, 1e-10, kDefaultStartThreshold, false).final_state()[0];
        EXPECT_LE(std::abs(b.value - ph), 1e-6) << eps << " " << x << " " << t;
        EXPECT_LE(std::abs(b.value - ode), 1e-6) << eps << " " << x << " " << t;
        EXPECT_LE(std::abs(ph - ode), 1e-6) << eps << " " << x << " " << t;
      }
    }
  }
}

TEST(BesselSeries, DivergenceConfinedToIndividualTerms) {
  const TwoStateModel base(0.0, 1.0, 0.5, 0.5);
  double prev = 0.0;
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    const auto b = bessel_series_a(base.with_eps(eps), 0.0, 400, 1e-16);
    EXPECT_GT(b.max_term, prev);
    prev = b.max_term;
    const double a0 = std::abs(evolve_two_state(base.with_eps(eps), 0.0, 1e-10, kDefaultStartThreshold, false).final_state()[0]);
    EXPECT_LE(a0, 1.0 + 1e-9);
  }
}

// ---- phase function and split --------------------------------------------------

TEST(PhaseF, VanishingCoupling) {
  EXPECT_NEAR(std::abs(phase_f(TwoStateModel(0.0, 1.0, 1e-10, 0.25), 0.0)), 0.0, 1e-19);
}

TEST(PhaseSplit, DivergentCoefficientMatchesQuadrature) {
  for (double x : {0.1, 0.3, 0.5, 0.7}) {
    const auto s = phase_split(TwoStateModel(0.0, 1.0, x, 0.1), 60);
    EXPECT_NEAR(s.f_a, oracles::fa_quadrature(1.0, x), 1e-11) << x;
  }
}

TEST(PhaseSplit, ReferencePoint) {
  const auto s = phase_split(TwoStateModel(0.0, 1.0, 0.5, 0.1), 30);
  EXPECT_NEAR(std::exp(s.f_b), norm_n(1.0, 0.5), 1e-10);
  EXPECT_NEAR(std::exp(s.f_b), 0.9732490, 1e-7);
  EXPECT_NEAR(s.delta_e_a, shift(1.0, 0.5), 1e-10);
  EXPECT_LE(s.max_imag_residue, 1e-10);
}

TEST(PhaseSplit, SmallCouplingLogNorm) {
  for (double delta : {1.0, 2.0}) {
    const double x = 1e-3 * delta;
    const auto s = phase_split(TwoStateModel(0.0, delta, x, 0.1), 30);
    const double lead = -x * x / (8.0 * delta * delta);
    EXPECT_NEAR(s.f_b, lead, 10.0 * std::pow(x / delta, 4));
  }
}

TEST(PhaseSplit, RealityOnGrid) {
  for (double delta : {0.5, 1.0, 3.0}) {
    for (double ratio : {0.05, 0.4, 0.8}) {
      const auto s = phase_split(TwoStateModel(0.0, delta, ratio * delta, 0.2), 60);
      EXPECT_LE(s.max_imag_residue, 1e-10);
    }
  }
}

TEST(PhaseSplit, NormalisationIdentityOnGrid) {
  for (double x : {0.1, 0.3, 0.5, 0.7}) {
    const auto s = phase_split(TwoStateModel(0.0, 1.0, x, 0.1), 60);
    const double r = shift(1.0, x) / x;
    EXPECT_NEAR(std::exp(s.f_b) * std::sqrt(1.0 + r * r), 1.0, 1e-8) << x;
  }
}

TEST(PhaseSplit, RemainderScalesLinearlyInEps) {
  for (double x : {0.25, 0.5}) {
    const TwoStateModel m(0.0, 1.0, x, 0.1);
    for (double eps : {0.1, 0.05, 0.025}) {
      const cplx a = phase_split(m.with_eps(eps)).f_c;
      const cplx b = phase_split(m.with_eps(eps / 2.0)).f_c;
      const double ratio = std::abs(a) / std::abs(b);
      EXPECT_GE(ratio, 1.0) << x << " " << eps;
      EXPECT_LE(ratio, 4.0) << x << " " << eps;
      EXPECT_NEAR(ratio, 2.0, 0.2);
    }
  }
}

TEST(PhaseSplit, LeadingRemainderEstimate) {
  const TwoStateModel m(0.0, 1.0, 0.5, 0.01);
  const auto s = phase_split(m);
  EXPECT_LE(std::abs(s.f_c - s.f_c_leading), 0.05 * std::abs(s.f_c));
}

TEST(PhaseSplit, RemainderReproducesFiniteEpsPhase) {
  // f(0, eps) = F_a + eps (i F_b) + eps F_c by construction of the split.
  const TwoStateModel m(0.0, 1.0, 0.5, 0.3);
  const auto s = phase_split(m, 60);
  const cplx f = phase_f(m, 0.0, 60);
  EXPECT_NEAR(std::abs(f - (s.f_a + m.eps() * (I * s.f_b + s.f_c))), 0.0, 1e-13);
}

TEST(PhaseSplit, OutsideRadiusIsDomainError) {
  EXPECT_THROW(phase_split(TwoStateModel(0.0, 1.0, 1.1, 0.1)), DomainError);
}

TEST(FbIdentity, ReferencePointAndRelations) {
  const auto r = fb_identity_check(1.0, 0.5, 30);
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_NEAR(r.rhs, norm_n(1.0, 0.5), 1e-15);
  EXPECT_LE(std::abs(r.quadratic_residual), 1e-9);
  EXPECT_LE(std::abs(r.balance_residual), 1e-8);
}

TEST(FbIdentity, SmallCoupling) {
  const auto r = fb_identity_check(1.0, 1e-9, 30);
  EXPECT_NEAR(r.lhs, 1.0, 1e-15);
  EXPECT_NEAR(r.rhs, 1.0, 1e-15);
}

// ---- evolution -----------------------------------------------------------------

TEST(EvolveTwoState, StartTimeMeetsThreshold) {
  const TwoStateModel m(0.0, 1.0, 0.5, 0.25);
  const double t0 = start_time(m, 0.0, 1e-8);
  EXPECT_NEAR(m.x() * std::exp(m.eps() * t0) / (2.0 * m.delta()), 1e-8, 1e-20);
  EXPECT_EQ(start_time(m, -500.0, 1e-8), -501.0);
}

TEST(EvolveTwoState, VanishingCouplingStaysPut) {
  const auto traj = evolve_two_state(TwoStateModel(0.0, 1.0, 1e-14, 0.25), 0.0, 1e-10);
  for (const auto& y : traj.states) {
    EXPECT_NEAR(std::abs(y[0] - 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(y[1]), 0.0, 1e-13);
  }
}

TEST(EvolveTwoState, Unitarity) {
  for (double eps : {0.5, 0.25, 0.1}) {
    const auto traj = evolve_two_state(TwoStateModel(0.0, 1.0, 0.5, eps), 0.0, 1e-10);
    for (const auto& y : traj.states) EXPECT_NEAR(std::norm(y[0]) + std::norm(y[1]), 1.0, 1e-8);
  }
}

TEST(EvolveTwoState, RejectsBadThreshold) {
  const TwoStateModel m(0.0, 1.0, 0.5, 0.25);
  EXPECT_THROW(evolve_two_state(m, 0.0, 1e-10, 0.5), ContractError);
  EXPECT_THROW(evolve_two_state(m, 0.0, 0.0), ContractError);
}

TEST(EvolveTwoState, ApproachesAdiabaticNorm) {
  const double target = norm_n(1.0, 0.5);
  double prev = 1.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto y = evolve_two_state(TwoStateModel(0.0, 1.0, 0.5, eps), 0.0, 1e-12, 1e-10, false).final_state();
    const double err = std::abs(std::abs(y[0]) - target);
    EXPECT_LT(err, prev) << eps;
    prev = err;
  }
  EXPECT_LE(prev, 5e-3);
}

// ---- limit state ------------------------------------------------------------------

TEST(LimitState, IsTheAdiabaticEigenstate) {
  const TwoStateModel m(0.0, 1.0, 0.5, 0.1);
  const auto ls = limit_state(m, 0.0);
  const auto es = exact_eigensystem(m);
  EXPECT_NEAR(std::abs(ls.state[0] - es.psi0[0]), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(ls.state[1] - es.psi0[1]), 0.0, 1e-9);
  EXPECT_NEAR(ls.state[0].real(), 0.9732490, 1e-7);
  EXPECT_NEAR(ls.state[1].real(), -0.2297529, 1e-7);
  EXPECT_NEAR(ls.divergent_coefficient, oracles::fa_quadrature(1.0, 0.5), 1e-11);
}

TEST(LimitState, SecularPhaseAndVanishingCoupling) {
  const TwoStateModel m(0.4, 1.0, 1e-10, 0.1);
  const auto ls = limit_state(m, 2.0);
  const cplx expected = std::polar(1.0, -(0.4 - 1.0) * 2.0);
  EXPECT_NEAR(std::abs(ls.state[0] - expected), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(ls.state[1]), 0.0, 1e-10);

  const TwoStateModel m2(0.4, 1.0, 0.5, 0.1);
  const auto l2 = limit_state(m2, 3.0);
  EXPECT_NEAR(l2.secular_phase, shift(1.0, 0.5) * 3.0, 1e-12);
  const auto h = hamiltonian(m2);
  const auto e0 = exact_eigensystem(m2).e0;
  const auto hv = h.apply(numkit::cvec{l2.state[0], l2.state[1]});
  EXPECT_NEAR(std::abs(hv[0] - e0 * l2.state[0]), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(hv[1] - e0 * l2.state[1]), 0.0, 1e-9);
}
