#include "ulab/equilibrium.hpp"
#include "ulab/errors.hpp"
#include "ulab/orthopoly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ulab;

namespace {

// Normalized Hermite functions for the weight exp(-y^2), by their own three-term recurrence.
std::vector<double> hermite_functions(double y, int count) {
  std::vector<double> h(count);
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-y * y / 2);
  if (count > 1) h[1] = std::sqrt(2.0) * y * h[0];
  for (int k = 1; k + 1 < count; ++k) h[k + 1] = std::sqrt(2.0 / (k + 1)) * y * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
  return h;
}

const Potential gaussian({0.0, 0.5});
const Potential quartic({0.0, 0.0, 1.0 / 12.0});

}  // namespace

TEST(OrthoBasis, GaussianMatchesHermiteFunctions) {
  const int n = 24;
  const auto b = build_basis(gaussian, n);
  // Weight exp(-n x^2/2): psi_k(x) = (n/2)^{1/4} h_k(sqrt(n/2) x).
  const double s = std::sqrt(n / 2.0);
  for (double x : {-1.7, -0.2, 0.0, 0.55, 1.9}) {
    const auto h = hermite_functions(s * x, b.kmax() + 1);
    const auto p = b.evaluate(x, b.kmax() + 1);
    for (int k = 0; k <= b.kmax(); ++k) EXPECT_NEAR(p[k], std::sqrt(s) * h[k], 1e-10) << "k = " << k << " x = " << x;
  }
}

TEST(OrthoBasis, GaussianJacobiCoefficients) {
  const int n = 40;
  const auto b = build_basis(gaussian, n);
  ASSERT_EQ(static_cast<int>(b.jacobi_J().size()), b.kmax());
  for (int k = 0; k < b.kmax(); ++k) EXPECT_NEAR(b.jacobi_J()[k], std::sqrt((k + 1.0) / n), 1e-12);
  for (double q : b.jacobi_q()) EXPECT_NEAR(q, 0.0, 1e-13);
}

TEST(OrthoBasis, Orthonormality) {
  for (const auto* v : {&gaussian, &quartic})
    for (int n : {16, 32, 64}) {
      const auto b = build_basis(*v, n);
      EXPECT_LE(b.orthonormality_defect(), 1e-12);
      const Eigen::MatrixXd g = b.weighted().transpose() * b.weighted();
      EXPECT_LE((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE(b.recurrence_residual(), 1e-10);
      EXPECT_LE(b.tail_max(), 1e-6);
    }
}

TEST(OrthoBasis, ExtendedPrecisionAboveThreshold) {
  EXPECT_FALSE(build_basis(quartic, 64).extended_precision());
  EXPECT_TRUE(build_basis(quartic, 128).extended_precision());
}

TEST(OrthoBasis, Parity) {
  const auto b = build_basis(quartic, 20);
  for (double x : {0.3, 1.1, 2.2}) {
    const auto a = b.evaluate(x, b.kmax() + 1);
    const auto m = b.evaluate(-x, b.kmax() + 1);
    for (int k = 0; k <= b.kmax(); ++k) EXPECT_NEAR(m[k], (k % 2 ? -1.0 : 1.0) * a[k], 1e-12);
  }
}

TEST(OrthoBasis, OffGridEvaluationMatchesGrid) {
  const auto b = build_basis(quartic, 32);
  const auto& x = b.grid().nodes();
  for (Eigen::Index i : {Eigen::Index(5), x.size() / 3, x.size() / 2 + 7}) {
    const auto p = b.evaluate(x[i], b.kmax() + 1);
    for (int k = 0; k <= b.kmax(); ++k) EXPECT_NEAR(p[k], b.psi()(i, k), 1e-10);
  }
}

TEST(OrthoBasis, EpsilonAgainstSimpson) {
  const auto b = build_basis(gaussian, 16);
  const double L = b.potential().half_width();
  const int m = 20000;  // Simpson panels on each side
  auto integral = [&](double lo, double hi, int k) {
    const double h = (hi - lo) / m;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * b.evaluate(lo + i * h, k + 1)[k];
    }
    return s * h / 3.0;
  };
  for (double x : {-0.8, 0.15, 1.4})
    for (int k : {0, 3, 8, 16}) {
      const double want = 0.5 * (integral(-L, x, k) - integral(x, L, k));
      EXPECT_NEAR(b.evaluate_eps(x, k + 1)[k], want, 1e-9) << "k = " << k;
    }
}

TEST(OrthoBasis, EpsilonOnGridMatchesOffGrid) {
  const auto b = build_basis(quartic, 16);
  const auto& x = b.grid().nodes();
  const Eigen::Index i = x.size() / 2 + 11;
  const auto e = b.evaluate_eps(x[i], b.kmax() + 1);
  for (int k = 0; k <= b.kmax(); ++k) EXPECT_NEAR(e[k], b.eps_psi()(i, k), 1e-12);
  EXPECT_LE((apply_epsilon(b, 3) - b.eps_psi().col(3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(OrthoBasis, TruncationTooTightThrows) {
  // The interval [-2.05, 2.05] cuts the bulk of psi_n.
  EXPECT_THROW(build_basis(Potential({0.0, 0.5}, Domain{0.1, 1.0}), 16), BasisError);
}

TEST(OrthoBasis, VPrimeMatrixSkewSymmetric) {
  const auto b = build_basis(quartic, 16);
  const auto v = v_prime_matrix(b, 16);
  EXPECT_LE((v + v.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OrthoBasis, EpsilonParityBounds) {
  const auto small = build_basis(gaussian, 32);
  const auto large = build_basis(gaussian, 64);
  const auto r = parity_bound_check(small, large, 0.5);
  EXPECT_FALSE(r.vacuous);
  EXPECT_TRUE(r.passed) << "even ratio " << r.even_ratio << " odd ratio " << r.odd_ratio;
  EXPECT_TRUE(parity_bound_check(small, large, 2.0).vacuous);
}

TEST(OrthoBasis, DirichletMinimizerInRange) {
  const auto b = build_basis(quartic, 64);
  const auto d = dirichlet_check(b);
  EXPECT_GE(d.index, 64);
  EXPECT_LT(d.index, 64 + d.N / 2 + 1);
  EXPECT_GT(d.value, 0.0);
  EXPECT_LT(d.value, 1.0);
}
