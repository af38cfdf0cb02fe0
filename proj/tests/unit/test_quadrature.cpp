#include "ulab/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ulab;

TEST(GaussLegendre, ExactForPolynomials) {
  for (int order : {1, 2, 5, 12, 48}) {
    const auto r = gauss_legendre(order);
    for (int p = 0; p <= 2 * order - 1; ++p) {
      double sum = 0.0;
      for (int i = 0; i < order; ++i) sum += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = p % 2 == 0 ? 2.0 / (p + 1) : 0.0;
      EXPECT_NEAR(sum, exact, 1e-14) << "order " << order << " power " << p;
    }
  }
}

TEST(GaussLegendre, NodesSymmetricAndSorted) {
  const auto r = gauss_legendre(13);
  for (int i = 0; i < 13; ++i) {
    EXPECT_DOUBLE_EQ(r.nodes[i], -r.nodes[12 - i]);
    if (i > 0) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
  }
}

TEST(QuadGrid, IntegratesGaussian) {
  QuadGrid g(8.0, 32, 12);
  const auto& x = g.nodes();
  const auto& w = g.weights();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) sum += w[i] * std::exp(-x[i] * x[i]);
  EXPECT_NEAR(sum, std::sqrt(M_PI) * std::erf(8.0), 1e-14);
}

TEST(QuadGrid, CumulativeMatchesAntiderivative) {
  QuadGrid g(3.0, 16, 12);
  Eigen::MatrixXd f(g.size(), 1);
  for (Eigen::Index i = 0; i < g.size(); ++i) f(i, 0) = std::cos(g.nodes()[i]);
  const auto c = g.cumulative(f);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    EXPECT_NEAR(c(i, 0), std::sin(g.nodes()[i]) - std::sin(-3.0), 1e-13);
}

TEST(QuadGrid, PartialWeightsIntegrateInsidePanel) {
  QuadGrid g(2.0, 8, 10);
  const double x = 0.37;
  const int p = g.panel_of(x);
  const double left = -2.0 + p * g.panel_width();
  ASSERT_LE(left, x);
  ASSERT_GE(left + g.panel_width(), x);
  const auto pw = g.partial_weights(p, x);
  double sum = 0.0;
  for (int j = 0; j < g.order(); ++j) sum += pw[j] * std::exp(g.nodes()[p * g.order() + j]);
  EXPECT_NEAR(sum, std::exp(x) - std::exp(left), 1e-14);
}
