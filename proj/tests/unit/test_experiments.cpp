#include "ulab/errors.hpp"
#include "ulab/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ulab;

namespace {

constexpr double kPi = std::numbers::pi;

// Si(x) by its Taylor series; converges fast enough for |x| <= 4 pi.
double sine_integral_series(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 80; ++k) {
    term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term / (2.0 * k + 1.0);
  }
  return sum;
}

Laboratory& gaussian_lab() {
  static Laboratory lab{Potential({0.0, 0.5})};
  return lab;
}
Laboratory& quartic_lab() {
  static Laboratory lab{Potential({0.0, 0.0, 1.0 / 12.0})};
  return lab;
}

}  // namespace

TEST(SineKernel, Values) {
  EXPECT_EQ(sine_kernel(0.0), 1.0);
  EXPECT_NEAR(sine_kernel(1.0), 0.0, 1e-16);
  EXPECT_NEAR(sine_kernel(0.5), 2.0 / kPi, 1e-16);
  EXPECT_EQ(sine_kernel(1e-13), 1.0);
}

TEST(SineKernel, DerivativeValues) {
  EXPECT_NEAR(sine_kernel_derivative(1.0), -1.0, 1e-15);
  EXPECT_EQ(sine_kernel_derivative(0.0), 0.0);
  for (double s : {-1.7, -0.3, 5e-5, 0.2, 2.4}) {
    const double h = 1e-6;
    EXPECT_NEAR(sine_kernel_derivative(s), (sine_kernel(s + h) - sine_kernel(s - h)) / (2 * h), 1e-8) << s;
  }
}

TEST(SineKernel, IntegralAgainstSeries) {
  for (double s : {-3.5, -1.0, 0.0, 0.25, 1.0, 2.0, 4.0})
    EXPECT_NEAR(sine_kernel_integral(s), sine_integral_series(kPi * s) / kPi, 1e-13) << s;
}

TEST(Window, Validation) {
  const auto& eq = gaussian_lab().equilibrium();
  EXPECT_NO_THROW(make_window(eq, 1.0, uniform_grid(-2, 2, 5), {16, 32}));
  EXPECT_THROW(make_window(eq, 1.9, uniform_grid(-2, 2, 5), {16, 32}), std::invalid_argument);
  EXPECT_THROW(make_window(eq, 0.0, uniform_grid(-2, 2, 5), {16, 31}), std::invalid_argument);
  EXPECT_THROW(make_window(eq, 0.0, uniform_grid(-2, 2, 5), {32, 16}), std::invalid_argument);
  EXPECT_THROW(make_window(eq, 0.0, {}, {16}), std::invalid_argument);
}

TEST(Window, UniformGrid) {
  const auto g = uniform_grid(-2, 2, 41);
  ASSERT_EQ(g.size(), 41u);
  EXPECT_EQ(g.front(), -2.0);
  EXPECT_EQ(g.back(), 2.0);
  EXPECT_NEAR(g[20], 0.0, 1e-15);
}

TEST(Laboratory, RejectsUnnormalizedPotential) {
  EXPECT_THROW(Laboratory(Potential({0.0, 0.0, 0.25})), EquilibriumError);
}

TEST(Laboratory, CachesPipelines) {
  auto& lab = gaussian_lab();
  const auto& a = lab.at(16);
  const auto& b = lab.at(16);
  EXPECT_EQ(&a, &b);
  ASSERT_NE(a.kernel, nullptr);
  EXPECT_EQ(a.basis.n(), 16);
}

TEST(UnitaryBulk, GaussianOrdering) {
  for (double l0 : {0.0, 1.0}) {
    const auto w = make_window(gaussian_lab().equilibrium(), l0, uniform_grid(-2, 2, 41), {20, 40, 80});
    const auto t = unitary_bulk_convergence(gaussian_lab(), w);
    EXPECT_TRUE(t.decreasing);
    EXPECT_LE(t.rows.back().diag_error, 0.1);
  }
}

TEST(UnitaryBulk, QuarticOrdering) {
  const auto w = make_window(quartic_lab().equilibrium(), 1.0, uniform_grid(-2, 2, 41), {20, 40, 80});
  EXPECT_TRUE(unitary_bulk_convergence(quartic_lab(), w).decreasing);
}

TEST(OrthogonalBulk, LimitBlock) {
  const auto b = limit_block(1.0);
  EXPECT_NEAR(b.a12, -1.0, 1e-15);
  EXPECT_NEAR(b.a11, 0.0, 1e-16);
  EXPECT_EQ(limit_block(0.0).a21, 0.0);
  // Int_0^inf sinc = 1/2 cancels eps for large s.
  EXPECT_NEAR(limit_block(40.0).a21, 0.0, 0.01);
}

TEST(OrthogonalBulk, BlocksConverge) {
  for (auto* lab : {&gaussian_lab(), &quartic_lab()}) {
    const auto w = make_window(lab->equilibrium(), 0.0, uniform_grid(-2, 2, 21), {16, 32, 64});
    const auto t = orthogonal_bulk_convergence(*lab, w);
    EXPECT_TRUE(t.passed());
    EXPECT_EQ(t.sd_sign, 1);
    EXPECT_LT(t.sd_residual_plus, t.sd_residual_minus);
  }
}

TEST(OrthogonalBulk, ScaledBlockMatchesPairFormula) {
  auto& lab = quartic_lab();
  const auto& pipe = lab.at(32);
  const double rho = density(lab.equilibrium(), 0.0);
  const auto a = pipe.kernel->point(0.01), b = pipe.kernel->point(-0.02);
  const auto blk = scaled_block(*pipe.kernel, a, b, rho);
  const auto raw = pipe.kernel->K1(a, b);
  EXPECT_NEAR(blk.a11, raw.a11 / (32 * rho), 1e-14);
  EXPECT_NEAR(blk.a12, raw.a12 / (32 * rho * rho), 1e-14);
  EXPECT_NEAR(blk.a21, (raw.a21 + epsilon_sign(0.03)) / 32 - epsilon_sign(0.03), 1e-14);
}

TEST(InvertibilityScan, Stable) {
  const int ns[] = {16, 32, 64};
  for (auto* lab : {&gaussian_lab(), &quartic_lab()}) {
    const auto t = theorem2_scan(*lab, ns);
    EXPECT_TRUE(t.no_collapse);
    EXPECT_TRUE(t.odd_singular);
    for (const auto& r : t.rows) EXPECT_NEAR(r.inverse_norm * r.smin, 1.0, 1e-14);
  }
  const int odd[] = {15};
  EXPECT_THROW(theorem2_scan(gaussian_lab(), odd), std::invalid_argument);
}

TEST(Cluster, TraceOfProducts) {
  KernelBlock a{1, 2, 3, 4}, b{0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(cluster_value({a}), 5.0);
  // [[1,2],[3,4]] [[0,1],[1,0]] = [[2,1],[4,3]]
  EXPECT_DOUBLE_EQ(cluster_value({a, b}), 5.0);
}

TEST(Cluster, LimitValues) {
  EXPECT_NEAR(cluster_value({limit_block(0.0)}), 2.0, 1e-15);
  EXPECT_LT(std::abs(cluster_value({limit_block(20.0), limit_block(-20.0)})), 0.01);
}

TEST(Cluster, ConvergeForKUpToThree) {
  const auto w = make_window(quartic_lab().equilibrium(), 0.0, uniform_grid(-2, 2, 21), {16, 32, 64});
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE(cluster_functions(quartic_lab(), w, k).decreasing) << k;
  EXPECT_THROW(cluster_functions(quartic_lab(), w, 4), std::invalid_argument);
}

TEST(CTrace, QuarticDecreasesGaussianVanishes) {
  const int ns[] = {16, 32, 64};
  const auto q = c_trace(quartic_lab(), ns);
  EXPECT_LT(std::abs(q[2].c), std::abs(q[0].c));
  for (const auto& r : c_trace(gaussian_lab(), ns)) EXPECT_LT(std::abs(r.c), 1e-10);
}

TEST(Sequence, DecreasingWithFloor) {
  EXPECT_TRUE(decreasing_sequence({3, 2, 1}));
  EXPECT_FALSE(decreasing_sequence({3, 3, 1}));
  EXPECT_TRUE(decreasing_sequence({1e-13, 2e-13}, 1e-12));
  EXPECT_FALSE(decreasing_sequence({1e-13, 2e-12}, 1e-12));
}
