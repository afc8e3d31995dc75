#include <gtest/gtest.h>

#include <random>

#include "cavref/analytic.hpp"

using namespace cavref;

namespace {

SystemParams fig_params(double rabi) {
  SystemParams p;
  p.kappa = 1.0;
  p.mu_c = 0.1;
  p.gamma_e = 0.5;
  p.omega_rabi = rabi;
  return p;
}

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate(0.0, 3.0), det(-5.0, 5.0), ph(-pi, pi);
  SystemParams p;
  p.kappa = rate(rng);
  p.mu_c = rate(rng);
  p.gamma_e = rate(rng);
  p.gamma_el = rate(rng);
  p.delta_e = det(rng);
  p.delta_0 = det(rng);
  p.omega_rabi = std::polar(rate(rng) * 2.0, ph(rng));
  return p;
}

}  // namespace

TEST(Roots, WorkedExample) {
  SystemParams p;
  p.kappa = 1.0;
  p.gamma_e = 2.0;
  p.omega_rabi = 0.5;
  const auto [P1, P2] = roots_P(p);
  EXPECT_NEAR(std::abs(P1 - cplx(-1.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(P2 - cplx(-1.0, -0.5)), 0.0, 1e-15);
}

TEST(Roots, UncoupledRootsAreTheDampings) {
  SystemParams p;
  p.kappa = 1.0;
  p.mu_c = 0.4;
  p.gamma_e = 0.2;
  p.delta_e = 0.7;
  const auto [P1, P2] = roots_P(p);
  const cplx a = -p.kappa_sigma(), b = -p.p_e();
  const bool direct = std::abs(P1 - a) < 1e-14 && std::abs(P2 - b) < 1e-14;
  const bool swapped = std::abs(P1 - b) < 1e-14 && std::abs(P2 - a) < 1e-14;
  EXPECT_TRUE(direct || swapped);
}

TEST(Roots, StrongCouplingSplitting) {
  auto p = fig_params(1000.0);
  const auto [P1, P2] = roots_P(p);
  EXPECT_NEAR(P1.imag() / 1000.0, 1.0, 1e-6);
  EXPECT_NEAR(P2.imag() / 1000.0, -1.0, 1e-6);
  EXPECT_LT(std::abs(P1.real()) / 1000.0, 1e-3);
}

TEST(Roots, SatisfyCharacteristicEquation) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto p = random_params(rng);
    const auto [P1, P2] = roots_P(p);
    const double scale = std::max({1.0, p.kappa_sigma() * p.kappa_sigma(), std::norm(p.omega_rabi), std::norm(p.p_e())});
    for (const cplx P : {P1, P2})
      EXPECT_LT(std::abs((P + p.kappa_sigma()) * (p.p_e() + P) + std::norm(p.omega_rabi)), 1e-12 * scale);
  }
}

TEST(Reflection, EmptyCavityValue) {
  // 1 - 0.5 / 0.2625 = -19/21
  EXPECT_NEAR(reflection_R1(fig_params(0.0)).R1.real(), -19.0 / 21.0, 1e-14);
  EXPECT_NEAR(-19.0 / 21.0, -0.904762, 5e-7);
}

TEST(Reflection, UnitRabiValue) {
  // 1 - 0.5 / 1.2625 = 61/101
  EXPECT_NEAR(reflection_R1(fig_params(1.0)).R1.real(), 61.0 / 101.0, 1e-14);
  EXPECT_NEAR(61.0 / 101.0, 0.603960, 5e-7);
}

TEST(Reflection, StrongCouplingApproachesOne) {
  EXPECT_NEAR(reflection_R1(fig_params(100.0)).R1.real(), 1.0, 1e-4);
}

TEST(Reflection, LowLossEmptyCavityApproachesMinusOne) {
  auto p = fig_params(0.0);
  p.mu_c = 1e-6;
  EXPECT_NEAR(reflection_R1(p).R1.real(), -1.0, 1e-5);
}

TEST(Reflection, ProductOfRootsEqualsLineshape) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const auto p = random_params(rng);
    const auto [P1, P2] = roots_P(p);
    const cplx id{0.0, p.delta_0};
    const cplx a = (P1 + id) * (P2 + id);
    const cplx b = reflection_denominator(p, p.delta_0);
    EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b)));
  }
}

TEST(Reflection, Passive) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const auto p = random_params(rng);
    EXPECT_LE(std::abs(reflection_R1(p).R1), 1.0 + 1e-9);
  }
}

TEST(Reflection, ResonantCaseIsExactlyReal) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    auto p = random_params(rng);
    p.delta_0 = 0.0;
    p.delta_e = 0.0;
    p.omega_rabi = std::abs(p.omega_rabi);
    const auto r = reflection_R1(p);
    EXPECT_EQ(r.R1.imag(), 0.0);
    const double closed = 1.0 - p.gamma() * p.kappa / (0.5 * p.gamma() * p.kappa_sigma() + std::norm(p.omega_rabi));
    if (std::isfinite(closed)) {
      EXPECT_NEAR(r.R1.real(), closed, 1e-12);
    }
  }
}

TEST(Reflection, MonotoneInRabiFrequency) {
  double prev = -2.0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = reflection_R1(fig_params(5.0 * i / 1000.0)).R1.real();
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Reflection, LossFractionAndFlags) {
  ReflectionOptions o;
  o.bandwidth = 0.01;
  const auto strong = reflection_R1(fig_params(10.0), o);
  EXPECT_TRUE(strong.strong_coupling);
  EXPECT_FALSE(strong.weak_coupling);
  EXPECT_TRUE(strong.narrowband_ok);
  EXPECT_NEAR(strong.loss_fraction, 1.0 - std::norm(strong.R1), 1e-15);
  const auto weak = reflection_R1(fig_params(0.01), o);
  EXPECT_TRUE(weak.weak_coupling);
  o.bandwidth = 1.0;
  EXPECT_FALSE(reflection_R1(fig_params(0.01), o).narrowband_ok);
  EXPECT_FALSE(reflection_R1(fig_params(0.01)).narrowband_ok);
}

TEST(Reflection, RotationAngleLimits) {
  for (int i = 1; i < 200; ++i) {
    const double phi = -0.5 * pi + pi * i / 200.0;
    if (std::abs(std::abs(phi) - 0.5 * pi) < 1e-6) continue;
    EXPECT_NEAR(rotation_angle(phi, 1.0), -phi, 1e-9);
    EXPECT_NEAR(rotation_angle(phi, -1.0), phi, 1e-9);
    ReflectionOptions o;
    o.phi = phi;
    auto p = fig_params(0.0);
    p.mu_c = 0.0;
    EXPECT_NEAR(std::abs(std::remainder(reflection_R1(p, o).phi_prime - phi, pi)), 0.0, 1e-9);
  }
}

TEST(Critical, ResonantBranchExample) {
  SystemParams p;
  p.gamma_e = 1.0;
  p.mu_c = 1.0;
  p.omega_rabi = 0.5;
  const auto sols = critical_coupling(p);
  ASSERT_EQ(sols.size(), 2u);  // 0.5 >= gamma / 2 also admits the detuned branch
  const auto& e5 = sols.back();
  EXPECT_EQ(e5.branch, CriticalBranch::resonant);
  EXPECT_NEAR(e5.kappa, 1.0, 1e-15);
  ASSERT_EQ(e5.delta_0.size(), 1u);
  EXPECT_EQ(e5.delta_0[0], 0.0);
  EXPECT_LT(e5.max_abs_R1, 1e-10);
}

TEST(Critical, DetunedBranchExample) {
  SystemParams p;
  p.gamma_e = 0.2;
  p.mu_c = 0.2;
  p.omega_rabi = 1.0;
  const auto sols = critical_coupling(p);
  ASSERT_EQ(sols.size(), 2u);
  const auto& e4 = sols.front();
  EXPECT_EQ(e4.branch, CriticalBranch::detuned);
  EXPECT_NEAR(e4.kappa, 0.2, 1e-15);
  ASSERT_EQ(e4.delta_0.size(), 2u);
  EXPECT_NEAR(e4.delta_0[1], std::sqrt(0.99), 1e-15);
  EXPECT_NEAR(e4.delta_0[1], 0.994987, 5e-7);
  EXPECT_NEAR(e4.delta_0[0], -std::sqrt(0.99), 1e-15);
  EXPECT_LT(e4.max_abs_R1, 1e-10);
}

TEST(Critical, DetunedBranchOmittedBelowThreshold) {
  SystemParams p;
  p.gamma_e = 1.0;
  p.omega_rabi = 0.3;
  const auto sols = critical_coupling(p);
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_EQ(sols[0].branch, CriticalBranch::resonant);
}

TEST(Critical, BranchesCoincideAtThreshold) {
  SystemParams p;
  p.gamma_e = 0.8;
  p.mu_c = 0.3;
  p.omega_rabi = 0.4;
  const auto sols = critical_coupling(p);
  ASSERT_EQ(sols.size(), 2u);
  EXPECT_NEAR(sols[0].kappa, sols[1].kappa, 1e-15);
  EXPECT_EQ(sols[0].delta_0, std::vector<double>{0.0});
}

TEST(Critical, EverySolutionIsNull) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 2000; ++i) {
    SystemParams p;
    p.gamma_e = u(rng);
    p.gamma_el = u(rng);
    p.mu_c = u(rng);
    p.omega_rabi = std::polar(u(rng), u(rng));
    for (const auto& s : critical_coupling(p)) EXPECT_LT(s.max_abs_R1, 1e-10);
  }
}

TEST(Critical, Preconditions) {
  SystemParams p;
  EXPECT_THROW(critical_coupling(p), std::invalid_argument);
  p.gamma_e = 1.0;
  p.delta_e = 0.1;
  EXPECT_THROW(critical_coupling(p), std::invalid_argument);
}

TEST(Geometry, KappaFromDecayLength) {
  const double c = 3.0, kref = 0.7;
  EXPECT_NEAR(kappa_from_geometry(c, c / (2.0 * kref), c), kref, 1e-15);
  EXPECT_NEAR(l_d_fabry_perot(0.01, 100.0), 1.0, 1e-15);
  EXPECT_NEAR(kappa_from_geometry(1.0, 4.0), 0.5 * kappa_from_geometry(1.0, 2.0), 1e-15);
  EXPECT_THROW(kappa_from_geometry(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(l_d_fabry_perot(0.0, 1.0), std::invalid_argument);
}

TEST(Dephasing, NoDephasingNoNoise) {
  auto p = fig_params(3.0);
  for (auto r : {DephasingRegime::cavity_resonant, DephasingRegime::polariton_resonant, DephasingRegime::critical})
    EXPECT_EQ(dephasing_fraction(p, r).fraction, 0.0);
}

TEST(Dephasing, EqualRatesAtCriticalCouplingGiveQuarter) {
  SystemParams p;
  p.gamma_el = 0.3;
  p.gamma_e = 0.3;
  p.mu_c = 0.3;
  EXPECT_NEAR(dephasing_fraction(p, DephasingRegime::critical).fraction, 0.25, 1e-15);
}

TEST(Dephasing, CriticalFormulaIsPolaritonFormulaOnTheDetunedBranch) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int i = 0; i < 100; ++i) {
    SystemParams p;
    p.gamma_e = u(rng);
    p.gamma_el = u(rng);
    p.mu_c = u(rng);
    p.kappa = 0.5 * p.mu_c + 0.5 * p.gamma();
    EXPECT_NEAR(dephasing_fraction(p, DephasingRegime::polariton_resonant).fraction,
                dephasing_fraction(p, DephasingRegime::critical).fraction, 1e-12);
  }
}

TEST(Dephasing, CavityResonantDecaysWithCoupling) {
  auto p = fig_params(1.0);
  p.gamma_el = 0.2;
  double prev = dephasing_fraction(p, DephasingRegime::cavity_resonant).fraction;
  EXPECT_FALSE(dephasing_fraction(p, DephasingRegime::cavity_resonant).strong_coupling_ok);
  for (double r : {10.0, 100.0, 1000.0}) {
    p.omega_rabi = r;
    const double f = dephasing_fraction(p, DephasingRegime::cavity_resonant).fraction;
    EXPECT_LT(f, prev);
    prev = f;
  }
  EXPECT_LT(prev, 1e-6);
  p.omega_rabi = 0.0;
  EXPECT_THROW(dephasing_fraction(p, DephasingRegime::cavity_resonant), DegenerateParameter);
}
