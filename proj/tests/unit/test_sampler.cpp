#include "ulab/sampler.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

using namespace ulab;

namespace {

const Potential gaussian({0.0, 0.5});

double brute_force(const std::vector<double>& l, const Potential& v, int beta, int n) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    s -= 0.5 * n * beta * v(l[i]);
    for (std::size_t j = 0; j < l.size(); ++j)
      if (i != j) s += 0.5 * beta * std::log(std::abs(l[i] - l[j]));
  }
  return s;
}

}  // namespace

TEST(LogDensity, TwoPointExample) {
  const std::vector<double> l{-1.0, 1.0};
  EXPECT_NEAR(log_unnormalized_density(l, gaussian, 2, 2), -2.0 + 2.0 * std::log(2.0), 1e-15);
}

TEST(LogDensity, PermutationInvariant) {
  std::vector<double> l{0.3, -1.2, 0.9, 1.7, -0.1};
  const double a = log_unnormalized_density(l, gaussian, 1, 5);
  std::reverse(l.begin(), l.end());
  std::swap(l[1], l[3]);
  EXPECT_NEAR(log_unnormalized_density(l, gaussian, 1, 5), a, 1e-13);
}

TEST(LogDensity, BruteForce) {
  const Potential q({0.0, 0.0, 1.0 / 12.0});
  const std::vector<double> l{-0.4, 0.25, 1.3};
  for (int beta : {1, 2}) EXPECT_NEAR(log_unnormalized_density(l, q, beta, 3), brute_force(l, q, beta, 3), 1e-13);
}

TEST(LogDensity, CoincidenceIsMinusInfinity) {
  const std::vector<double> l{0.5, 0.5};
  EXPECT_EQ(log_unnormalized_density(l, gaussian, 2, 2), -std::numeric_limits<double>::infinity());
}

TEST(Metropolis, DetailedBalance) {
  for (auto [a, b] : {std::pair{-3.0, -1.5}, std::pair{0.2, 0.7}, std::pair{4.0, -2.0}})
    EXPECT_NEAR(std::exp(a) * metropolis_acceptance(a, b), std::exp(b) * metropolis_acceptance(b, a), 1e-15);
  EXPECT_EQ(metropolis_acceptance(0.0, -std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Metropolis, RejectsBadArguments) {
  EXPECT_THROW(metropolis_run(gaussian, 16, 3, 200000, 1), std::invalid_argument);
  EXPECT_THROW(metropolis_run(gaussian, 200, 2, 200000, 1), std::invalid_argument);
  EXPECT_THROW(metropolis_run(gaussian, 16, 2, 10, 1), std::invalid_argument);
}

TEST(Metropolis, ReproducibleAndSeedSensitive) {
  SamplerOptions opt;
  opt.burn_in = 5000;
  const auto a = metropolis_run(gaussian, 16, 2, 20000, 11, opt);
  const auto b = metropolis_run(gaussian, 16, 2, 20000, 11, opt);
  const auto c = metropolis_run(gaussian, 16, 2, 20000, 12, opt);
  ASSERT_EQ(a.values.size(), b.values.size());
  EXPECT_EQ(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)), 0);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.count(), static_cast<std::size_t>(15000 / 32));
}

TEST(Metropolis, AcceptanceTunedAndCacheConsistent) {
  const auto s = metropolis_run(gaussian, 32, 1, 150000, 3);
  EXPECT_GE(s.acceptance, 0.15);
  EXPECT_LE(s.acceptance, 0.55);
  EXPECT_LT(s.max_resync_drift, 1e-8);
  for (std::size_t i = 0; i < s.count(); ++i) EXPECT_TRUE(std::is_sorted(s.sample(i).begin(), s.sample(i).end()));
}

TEST(Metropolis, ChainsConcatenate) {
  SamplerOptions opt;
  opt.burn_in = 5000;
  const std::uint64_t seeds[] = {1, 2};
  const auto all = metropolis_chains(gaussian, 16, 2, 10000, seeds, opt);
  const auto first = metropolis_run(gaussian, 16, 2, 10000, 1, opt);
  EXPECT_EQ(all.count(), 2 * first.count());
  EXPECT_TRUE(std::equal(first.values.begin(), first.values.end(), all.values.begin()));
}

TEST(Surmise, NormalizedAndConsistent) {
  for (int beta : {1, 2}) {
    double mass = 0.0, mean = 0.0;
    const double h = 1e-3;
    for (int i = 0; i < 10000; ++i) {
      const double s = (i + 0.5) * h;
      mass += wigner_surmise(beta, s) * h;
      mean += s * wigner_surmise(beta, s) * h;
    }
    EXPECT_NEAR(mass, 1.0, 1e-6);
    EXPECT_NEAR(mean, 1.0, 1e-6);
    EXPECT_NEAR(wigner_surmise_cdf(beta, 1.3), [&] {
      double m = 0.0;
      for (int i = 0; i < 1300; ++i) m += wigner_surmise(beta, (i + 0.5) * h) * h;
      return m;
    }(), 1e-6);
  }
  EXPECT_THROW(wigner_surmise(4, 1.0), std::invalid_argument);
}

TEST(Spacing, SmallRunStatistics) {
  const auto eq = compute_P(gaussian);
  SamplerOptions opt;
  opt.burn_in = 50000;
  const auto s = metropolis_run(gaussian, 32, 2, 50000 + 2000L * 64, 5, opt);
  EXPECT_LT(ncm_kolmogorov(s, eq), 0.05);
  const auto h = spacing_statistics(s, eq);
  EXPECT_NEAR(h.mean_spacing, 1.0, 0.03);
  EXPECT_LT(h.total_variation, 0.08);
  EXPECT_LT(h.small_fraction, 0.01);
  EXPECT_LT(h.pair_suppression, 0.2);
  ASSERT_EQ(h.centers.size(), 40u);
  double mass = 0.0;
  for (double d : h.empirical) mass += d * h.bin_width;
  EXPECT_LE(mass, 1.0 + 1e-12);
  EXPECT_GT(mass, 0.99);
}
