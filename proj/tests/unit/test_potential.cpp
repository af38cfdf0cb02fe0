#include "ulab/potential.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>

using namespace ulab;

TEST(Potential, EvaluatesEvenPolynomial) {
  Potential v({0.5, -1.0, 0.25});
  for (double x : {-2.0, -0.3, 0.0, 1.7}) EXPECT_NEAR(v(x), 0.5 - x * x + 0.25 * std::pow(x, 4), 1e-14);
}

TEST(Potential, ExactlySymmetric) {
  Potential v({0.1, 0.37, 1.0 / 12.0, 0.013});
  for (double x : {0.123456789, 1.5, 3.3, 4.9})
    EXPECT_EQ(std::bit_cast<std::uint64_t>(v(x)), std::bit_cast<std::uint64_t>(v(-x)));
}

TEST(Potential, DerivativesMatchFiniteDifferences) {
  Potential v({0.0, 0.5, 1.0 / 12.0});
  const double h = 1e-5;
  for (double x : {-1.9, -0.4, 0.8, 2.6}) {
    EXPECT_NEAR(v.derivative(x), (v(x + h) - v(x - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(v.second_derivative(x), (v.derivative(x + h) - v.derivative(x - h)) / (2 * h), 1e-7);
  }
  const std::complex<double> z(0.3, 0.7);
  EXPECT_NEAR(std::abs(v.derivative(z) - (v(z + h) - v(z - h)) / (2 * h)), 0.0, 1e-8);
}

TEST(Potential, RejectsInvalidInput) {
  EXPECT_THROW(Potential({1.0}), std::invalid_argument);
  EXPECT_THROW(Potential({0.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(Potential({0.0, NAN}), std::invalid_argument);
  EXPECT_THROW(Potential({0.0, 1.0}, Domain{0.0, 1.0}), std::invalid_argument);
}

TEST(Potential, RescaleComposes) {
  Potential v({0.0, 0.0, 0.25});
  const double s = 0.8;
  const auto w = v.rescaled(s);
  for (double x : {-1.0, 0.5, 2.0}) EXPECT_NEAR(w(x), v(s * x), 1e-14);
}

TEST(Potential, HalfWidthFollowsDomain) {
  Potential v({0.0, 0.5}, Domain{3.0, 1.0});
  EXPECT_DOUBLE_EQ(v.half_width(), 3.5);
}

TEST(Potential, DerivativeBoundAgainstDenseScan) {
  for (auto coeffs : {std::vector<double>{0.0, 0.5}, std::vector<double>{0.0, 0.0, 1.0 / 12.0},
                      std::vector<double>{0.0, -0.2, 0.1, 0.01}}) {
    Potential v(coeffs);
    const double L = v.half_width();
    double scan = 0.0;
    for (int i = 0; i <= 200000; ++i) scan = std::max(scan, std::abs(v.derivative(-L + 2 * L * i / 200000.0)));
    EXPECT_NEAR(c_v_bound(v), scan, 1e-8 * (1 + scan));
  }
}
