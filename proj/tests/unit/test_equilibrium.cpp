#include "ulab/equilibrium.hpp"
#include "ulab/errors.hpp"
#include "ulab/orthopoly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ulab;

namespace {

constexpr double kPi = std::numbers::pi;

double semicircle(double x) { return std::abs(x) >= 2 ? 0.0 : std::sqrt(4 - x * x) / (2 * kPi); }
double semicircle_cdf(double x) { return 0.5 + x * std::sqrt(4 - x * x) / (4 * kPi) + std::asin(x / 2) / kPi; }

// Log potential of the semicircle law, Int log|x - y| rho(y) dy.
double semicircle_log_potential(double x) {
  const double a = std::abs(x);
  if (a <= 2) return x * x / 4 - 0.5;
  const double r = std::sqrt(x * x - 4);
  return x * x / 4 - 0.5 - a * r / 4 + std::log((a + r) / 2);
}

}  // namespace

TEST(Equilibrium, GaussianPolynomialIsOne) {
  const auto eq = compute_P(Potential({0.0, 0.5}));
  ASSERT_EQ(eq.p_coeffs.size(), 1u);
  EXPECT_NEAR(eq.p_coeffs[0], 1.0, 1e-14);
  EXPECT_NEAR(eq.delta1, 1.0, 1e-14);
  EXPECT_NEAR(eq.delta2, 1.0, 1e-14);
}

TEST(Equilibrium, QuarticPolynomial) {
  const auto eq = compute_P(Potential({0.0, 0.0, 1.0 / 12.0}));
  ASSERT_EQ(eq.p_coeffs.size(), 3u);
  EXPECT_NEAR(eq.p_coeffs[0], 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(eq.p_coeffs[1], 0.0, 1e-14);
  EXPECT_NEAR(eq.p_coeffs[2], 1.0 / 3.0, 1e-14);
  // 1/P ranges over [1/2, 3/2] on [-2, 2].
  EXPECT_NEAR(eq.delta1, 0.5, 1e-12);
  EXPECT_NEAR(eq.delta2, 1.5, 1e-12);
}

TEST(Equilibrium, DensityIsSemicircle) {
  const auto eq = compute_P(Potential({0.0, 0.5}));
  for (int i = 0; i <= 400; ++i) {
    const double x = -2.0 + i * 0.01;
    EXPECT_NEAR(density(eq, x), semicircle(x), 1e-14);
  }
  EXPECT_EQ(density(eq, 2.5), 0.0);
}

TEST(Equilibrium, Normalization) {
  EXPECT_NEAR(normalization(compute_P(Potential({0.0, 0.5}))), 1.0, 1e-13);
  EXPECT_NEAR(normalization(compute_P(Potential({0.0, 0.0, 1.0 / 12.0}))), 1.0, 1e-13);
  EquilibriumData raw;
  raw.p_coeffs = equilibrium_polynomial(Potential({0.0, 0.0, 0.25}));
  EXPECT_NEAR(normalization(raw), 3.0, 1e-12);
}

TEST(Equilibrium, CumulativeDensity) {
  const auto eq = compute_P(Potential({0.0, 0.5}));
  for (double x : {-2.0, -1.5, -0.2, 0.0, 0.9, 1.99, 2.0}) EXPECT_NEAR(cumulative_density(eq, x), semicircle_cdf(x), 1e-13);
}

TEST(Equilibrium, EffectivePotentialGaussian) {
  const Potential v({0.0, 0.5});
  const auto eq = compute_P(v);
  for (double x : {-1.9, -0.7, 0.0, 0.4, 1.3, 2.4, -3.1}) {
    const double want = 2 * semicircle_log_potential(x) - v(x);
    EXPECT_NEAR(effective_potential(eq, v, x), want, 1e-10) << "x = " << x;
  }
}

TEST(Equilibrium, ConditionsHoldForTestPotentials) {
  for (auto c : {std::vector<double>{0.0, 0.5}, std::vector<double>{0.0, 0.0, 1.0 / 12.0}}) {
    const auto r = check_conditions(Potential(c));
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(r.failures.empty());
    EXPECT_GT(r.u_outside_gap, 0.0);
    EXPECT_LT(r.u_interior_spread, 1e-10);
  }
}

TEST(Equilibrium, UnnormalizedQuarticFailsOnlyNormalization) {
  const auto r = check_conditions(Potential({0.0, 0.0, 0.25}));
  EXPECT_FALSE(r.c2);
  EXPECT_TRUE(r.c3);
  EXPECT_TRUE(r.c4);
  EXPECT_NEAR(r.normalization, 3.0, 1e-12);
}

TEST(Equilibrium, RescaleFindsQuarterRootOfThree) {
  const auto rs = rescale_to_standard_support(Potential({0.0, 0.0, 0.25}));
  EXPECT_NEAR(rs.scale, std::pow(3.0, -0.25), 1e-10);
  EXPECT_NEAR(rs.potential.even_coeffs()[2], 1.0 / 12.0, 1e-10);
  EXPECT_TRUE(check_conditions(rs.potential).passed());
}

TEST(Equilibrium, DoubleWellRejected) {
  // P(z) = z^2 vanishes inside the support.
  EXPECT_THROW(compute_P(Potential({0.0, -1.0, 0.25})), EquilibriumError);
}

TEST(Equilibrium, GammaEstimateSmallForGaussian) {
  // J_{n+k} = sqrt((n+k+1)/n): slope 1/2 in k/n.
  const Potential v({0.0, 0.5});
  auto eq = compute_P(v);
  const auto basis = build_basis(v, 64);
  const auto fit = estimate_gamma(eq, basis);
  EXPECT_NEAR(fit.gamma, 0.5, 0.05);
  EXPECT_EQ(eq.gamma, fit.gamma);
}
