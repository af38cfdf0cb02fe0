#pragma once

#include "ulab/equilibrium.hpp"
#include "ulab/potential.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ulab {

// -(n beta / 2) sum V(l_i) + beta sum_{j<k} log|l_j - l_k|; -inf on coincident points.
double log_unnormalized_density(std::span<const double> lambdas, const Potential& v, int beta, int n);

// min(1, exp(proposed - current)).
double metropolis_acceptance(double log_current, double log_proposed);

struct ChainState {
  std::vector<double> lambdas;
  double log_density = 0.0;
  std::uint64_t rng_seed = 0;
  double step_width = 0.0;
};

struct SamplerOptions {
  long burn_in = 100000;        // single-site proposals before recording
  long thin = 0;                // proposals between records; 0: 2n
  double initial_step = 0.0;    // 0: 1/n
  long adapt_every = 1000;
  long resync_every = 10000;
  double resync_tolerance = 1e-8;
};

struct SampleSet {
  int n = 0;
  int beta = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // count() rows of n sorted eigenvalues
  double acceptance = 0.0;     // after burn-in
  double step_width = 0.0;     // frozen value
  double max_resync_drift = 0.0;

  std::size_t count() const { return n == 0 ? 0 : values.size() / n; }
  std::span<const double> sample(std::size_t i) const { return {values.data() + i * n, static_cast<std::size_t>(n)}; }
};

// Single-site Gaussian Metropolis on the joint eigenvalue density. `steps` counts all proposals,
// burn-in included. Throws std::invalid_argument for beta outside {1, 2}, n > 128 or steps < burn-in.
SampleSet metropolis_run(const Potential& v, int n, int beta, long steps, std::uint64_t seed,
                         const SamplerOptions& opt = {});

// Independent chains, one per seed, run concurrently; samples concatenated in seed order.
SampleSet metropolis_chains(const Potential& v, int n, int beta, long steps, std::span<const std::uint64_t> seeds,
                            const SamplerOptions& opt = {});

// Kolmogorov distance between the pooled eigenvalue distribution and the equilibrium measure.
double ncm_kolmogorov(const SampleSet& s, const EquilibriumData& eq);

double wigner_surmise(int beta, double s);
double wigner_surmise_cdf(int beta, double s);

struct SpacingOptions {
  double lambda0 = 0.0;
  double half_window = 1.0;   // spacings with both ends in [lambda0 - h, lambda0 + h]
  int bins = 40;
  double s_max = 4.0;
  double pair_bin = 0.05;
  double pair_max = 0.5;
};

struct SpacingHistogram {
  int beta = 0;
  std::vector<double> centers;
  std::vector<double> empirical;  // density per bin
  std::vector<double> reference;  // bin-averaged surmise density
  double bin_width = 0.0;
  long spacings = 0;
  double mean_spacing = 0.0;
  double total_variation = 0.0;   // including the mass beyond s_max
  double small_fraction = 0.0;    // P(s < 0.05)
  std::vector<double> pair_centers;
  std::vector<double> pair_correlation;  // empirical two-point function, unit density
  std::vector<double> pair_reference;    // 1 - sinc^2 at the bin centre
  // max empirical pair correlation over bins whose upper edge has 1 - sinc^2 < 0.2.
  double pair_suppression = 0.0;
};

// Unfolds by u = n F(lambda), F the equilibrium distribution function.
SpacingHistogram spacing_statistics(const SampleSet& s, const EquilibriumData& eq, const SpacingOptions& opt = {});

}  // namespace ulab
