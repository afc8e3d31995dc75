#include <gtest/gtest.h>

#include <random>

#include "cavref/emitters.hpp"

using namespace cavref;

TEST(Eigensystem, DegenerateWithoutDipoleCoupling) {
  const auto s = build_eigensystem({1.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(s.E_plus, 1.0);
  EXPECT_DOUBLE_EQ(s.E_minus, 1.0);
  EXPECT_DOUBLE_EQ(s.E_g, 0.0);
  EXPECT_DOUBLE_EQ(s.E_ee, 2.0);
}

TEST(Eigensystem, DipoleSplitting) {
  const auto s = build_eigensystem({1.0, 0.1, 0.0, 0.0});
  EXPECT_NEAR(s.E_plus, 1.1, 1e-15);
  EXPECT_NEAR(s.E_minus, 0.9, 1e-15);
  EXPECT_NEAR(s.E_plus + s.E_minus, 2.0, 1e-15);
}

TEST(Eigensystem, CoefficientsAreHalfSqrtTwo) {
  const auto s = build_eigensystem({3.0, -0.4, 0.1, 0.2});
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_EQ(s.basis[1][1], r);
  EXPECT_EQ(s.basis[1][2], r);
  EXPECT_EQ(s.basis[2][1], r);
  EXPECT_EQ(s.basis[2][2], -r);
}

TEST(Eigensystem, BasisIsOrthonormal) {
  const auto s = build_eigensystem({1.0, 0.3, 0.0, 0.0});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 4; ++k) dot += s.basis[i][k] * s.basis[j][k];
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Eigensystem, RejectsNegativeRates) {
  EXPECT_THROW(build_eigensystem({1.0, 0.0, -1.0, 0.0}), std::invalid_argument);
}

TEST(Preparation, QuarterPeriodReachesTarget) {
  const auto p = prepare_with_classical_pulse(1.0, 0.5 * pi);
  EXPECT_NEAR(std::abs(p.target - cplx(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.ground), 0.0, 1e-15);
}

TEST(Preparation, ZeroAreaIsIdentity) {
  const auto p = prepare_with_classical_pulse(2.0, 0.0);
  EXPECT_EQ(p.ground, cplx(1.0, 0.0));
  EXPECT_EQ(p.target, cplx(0.0, 0.0));
}

TEST(Preparation, EighthPeriod) {
  const auto p = prepare_with_classical_pulse(0.25 * pi, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(p.target - cplx(0.0, r)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.ground - cplx(r, 0.0)), 0.0, 1e-15);
}

TEST(Preparation, UnitaryAndPeriodic) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = u(rng), t = u(rng);
    const auto a = prepare_with_classical_pulse(w, t);
    EXPECT_NEAR(std::norm(a.ground) + std::norm(a.target), 1.0, 1e-12);
    const auto b = prepare_with_classical_pulse(w, t + 2.0 * pi / w);
    EXPECT_NEAR(std::abs(a.ground - b.ground), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(a.target - b.target), 0.0, 1e-9);
  }
}

TEST(Preparation, RejectsNegativeInputs) {
  EXPECT_THROW(prepare_with_classical_pulse(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(prepare_with_classical_pulse(1.0, -1.0), std::invalid_argument);
}

TEST(Constraints, ZeroFieldFailsOnlyArea) {
  const EmitterParams p{1.0, 1.0, 0.01, 0.0};
  const auto r = validate_preparation_constraints(p, 0.0, 1.0, 0.1, 1.0, 1.0);
  EXPECT_TRUE(r.field_strength_ok());
  EXPECT_FALSE(r.pulse_area_ok);
  EXPECT_DOUBLE_EQ(r.pulse_area, 0.0);
}

TEST(Constraints, PhotonNumberWindowContainsTen) {
  // alpha = 0.1, Omega_dd / Omega_c = 10, (L/Delta)(gamma/Omega_c) = 1, sqrt(n) = 10.
  const EmitterParams p{1.0, 10.0, 1.0, 0.0};
  const auto r = validate_preparation_constraints(p, 10.0, 0.1, 0.1, 1.0, 1.0);
  EXPECT_NEAR(r.window_low, 1.0, 1e-15);
  EXPECT_NEAR(r.window_high, 100.0, 1e-12);
  EXPECT_NEAR(r.sqrt_n, 10.0, 1e-15);
  EXPECT_TRUE(r.photon_window_ok);
}

TEST(Constraints, DurationAtTwiceLifetimeFails) {
  const EmitterParams p{1.0, 10.0, 0.5, 0.25};
  const double g = p.gamma();
  const auto r = validate_preparation_constraints(p, 0.5 * pi * g / 2.0, 2.0 / g, 0.1, 1.0, 1.0);
  EXPECT_FALSE(r.duration_ok);
  const auto ok = validate_preparation_constraints(p, 0.5 * pi * g * 2.0, 0.5 / g, 0.1, 1.0, 1.0);
  EXPECT_TRUE(ok.duration_ok);
}

TEST(Constraints, FieldStrengthUsesMarginOfFive) {
  const EmitterParams p{1.0, 5.0, 0.0, 0.0};
  EXPECT_TRUE(validate_preparation_constraints(p, 1.99, 1.0, 0.1, 1.0, 1.0).antisymmetric_ok);
  EXPECT_FALSE(validate_preparation_constraints(p, 2.01, 1.0, 0.1, 1.0, 1.0).antisymmetric_ok);
}

TEST(Constraints, GoodPreparationPassesEverything) {
  const EmitterParams p{1.0, 100.0, 0.001, 0.0};
  const double rabi = 1.0;
  const auto r = validate_preparation_constraints(p, rabi, 0.5 * pi / rabi, 0.01, 1.0, 0.5);
  EXPECT_TRUE(r.all_ok());
}

TEST(Constraints, ZeroLeakCoefficientIsDedicatedError) {
  const EmitterParams p{1.0, 1.0, 0.0, 0.0};
  EXPECT_THROW(validate_preparation_constraints(p, 1.0, 1.0, 0.0, 1.0, 1.0), DegenerateParameter);
  EXPECT_THROW(validate_preparation_constraints(p, -1.0, 1.0, 0.1, 1.0, 1.0), std::invalid_argument);
}
