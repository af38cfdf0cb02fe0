#include "ulab/sampler.hpp"

#include "ulab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace ulab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double log_unnormalized_density(std::span<const double> lambdas, const Potential& v, int beta, int n) {
  double confine = 0.0;
  for (double x : lambdas) confine += v(x);
  double repel = 0.0;
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    for (std::size_t k = j + 1; k < lambdas.size(); ++k) {
      const double d = std::abs(lambdas[j] - lambdas[k]);
      if (d == 0.0) return kNegInf;
      repel += std::log(d);
    }
  return -0.5 * n * beta * confine + beta * repel;
}

double metropolis_acceptance(double log_current, double log_proposed) {
  if (log_proposed == kNegInf) return 0.0;
  const double d = log_proposed - log_current;
  return d >= 0.0 ? 1.0 : std::exp(d);
}

SampleSet metropolis_run(const Potential& v, int n, int beta, long steps, std::uint64_t seed,
                         const SamplerOptions& opt) {
  if (beta != 1 && beta != 2) throw std::invalid_argument("metropolis_run: beta must be 1 or 2");
  if (n < 2 || n > 128) throw std::invalid_argument("metropolis_run: n must lie in [2, 128]");
  if (steps < opt.burn_in) throw std::invalid_argument("metropolis_run: steps shorter than burn-in");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> site(0, n - 1);

  ChainState st;
  st.rng_seed = seed;
  st.lambdas.resize(n);
  for (int i = 0; i < n; ++i) st.lambdas[i] = -2.0 + 4.0 * (i + 0.5) / n;
  st.log_density = log_unnormalized_density(st.lambdas, v, beta, n);
  st.step_width = opt.initial_step > 0.0 ? opt.initial_step : 1.0 / n;
  const long thin = opt.thin > 0 ? opt.thin : 2L * n;
  const double half_nb = 0.5 * n * beta;

  SampleSet out;
  out.n = n;
  out.beta = beta;
  out.seed = seed;
  out.values.reserve(static_cast<std::size_t>((steps - opt.burn_in) / thin + 1) * n);

  long window_accepts = 0, window_moves = 0, accepted = 0, recorded_moves = 0;
  std::vector<double> sorted(n);
  for (long step = 0; step < steps; ++step) {
    const int i = site(rng);
    const double x = st.lambdas[i];
    const double y = x + st.step_width * gauss(rng);
    double delta = -half_nb * (v(y) - v(x));
    bool coincident = false;
    double logsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double num = y - st.lambdas[j];
      if (num == 0.0) {
        coincident = true;
        break;
      }
      logsum += std::log(std::abs(num / (x - st.lambdas[j])));
    }
    delta += beta * logsum;
    const double u = unif(rng);
    const bool accept = !coincident && u < metropolis_acceptance(0.0, delta);
    if (accept) {
      st.lambdas[i] = y;
      st.log_density += delta;
    }
    const bool burning = step < opt.burn_in;
    if (burning) {
      window_accepts += accept;
      if (++window_moves == opt.adapt_every) {
        const double rate = static_cast<double>(window_accepts) / window_moves;
        if (rate < 0.2) st.step_width *= 0.8;
        else if (rate > 0.5) st.step_width *= 1.25;
        window_accepts = window_moves = 0;
      }
    } else {
      accepted += accept;
      ++recorded_moves;
      if ((step - opt.burn_in + 1) % thin == 0) {
        std::copy(st.lambdas.begin(), st.lambdas.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        out.values.insert(out.values.end(), sorted.begin(), sorted.end());
      }
    }
    if ((step + 1) % opt.resync_every == 0) {
      const double fresh = log_unnormalized_density(st.lambdas, v, beta, n);
      const double drift = std::abs(fresh - st.log_density) / std::max(1.0, std::abs(fresh));
      out.max_resync_drift = std::max(out.max_resync_drift, drift);
      if (drift > opt.resync_tolerance) throw std::runtime_error("metropolis_run: cached log-density drifted");
      st.log_density = fresh;
    }
  }
  out.acceptance = recorded_moves > 0 ? static_cast<double>(accepted) / recorded_moves : 0.0;
  out.step_width = st.step_width;
  return out;
}

SampleSet metropolis_chains(const Potential& v, int n, int beta, long steps, std::span<const std::uint64_t> seeds,
                            const SamplerOptions& opt) {
  if (seeds.empty()) throw std::invalid_argument("metropolis_chains: no seeds");
  std::vector<SampleSet> parts;
  if (seeds.size() > 1 && std::thread::hardware_concurrency() > 1) {
    std::vector<std::future<SampleSet>> jobs;
    for (auto s : seeds)
      jobs.push_back(std::async(std::launch::async, [&, s] { return metropolis_run(v, n, beta, steps, s, opt); }));
    for (auto& j : jobs) parts.push_back(j.get());
  } else {
    for (auto s : seeds) parts.push_back(metropolis_run(v, n, beta, steps, s, opt));
  }
  SampleSet out = std::move(parts.front());
  double moves = 1.0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    out.values.insert(out.values.end(), parts[i].values.begin(), parts[i].values.end());
    out.acceptance += parts[i].acceptance;
    out.max_resync_drift = std::max(out.max_resync_drift, parts[i].max_resync_drift);
    moves += 1.0;
  }
  out.acceptance /= moves;
  return out;
}

double ncm_kolmogorov(const SampleSet& s, const EquilibriumData& eq) {
  std::vector<double> all = s.values;
  std::sort(all.begin(), all.end());
  const double m = static_cast<double>(all.size());
  double d = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double x = std::clamp(all[i], -2.0, 2.0);
    const double f = cumulative_density(eq, x);
    d = std::max({d, std::abs(f - i / m), std::abs(f - (i + 1) / m)});
  }
  return d;
}

double wigner_surmise(int beta, double s) {
  if (s < 0.0) return 0.0;
  if (beta == 1) return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
  if (beta == 2) return 32.0 / (kPi * kPi) * s * s * std::exp(-4.0 * s * s / kPi);
  throw std::invalid_argument("wigner_surmise: beta must be 1 or 2");
}

double wigner_surmise_cdf(int beta, double s) {
  if (s <= 0.0) return 0.0;
  if (beta == 1) return 1.0 - std::exp(-0.25 * kPi * s * s);
  if (beta == 2) return std::erf(2.0 * s / std::sqrt(kPi)) - 4.0 * s / kPi * std::exp(-4.0 * s * s / kPi);
  throw std::invalid_argument("wigner_surmise_cdf: beta must be 1 or 2");
}

SpacingHistogram spacing_statistics(const SampleSet& s, const EquilibriumData& eq, const SpacingOptions& opt) {
  if (!(density(eq, opt.lambda0) > 0.0)) throw std::invalid_argument("spacing_statistics: rho(lambda0) must be positive");
  SpacingHistogram h;
  h.beta = s.beta;
  h.bin_width = opt.s_max / opt.bins;
  std::vector<long> counts(opt.bins, 0);
  long beyond = 0, small = 0;
  double sum = 0.0;

  const int pair_bins = static_cast<int>(std::lround(opt.pair_max / opt.pair_bin));
  std::vector<long> pair_counts(pair_bins, 0);
  long centres = 0;

  const double lo = opt.lambda0 - opt.half_window, hi = opt.lambda0 + opt.half_window;
  const double n = s.n;
  std::vector<double> u(s.n);
  for (std::size_t k = 0; k < s.count(); ++k) {
    const auto lam = s.sample(k);
    for (int i = 0; i < s.n; ++i) u[i] = n * cumulative_density(eq, std::clamp(lam[i], -2.0, 2.0));
    for (int i = 0; i + 1 < s.n; ++i) {
      if (lam[i] < lo || lam[i + 1] > hi) continue;
      const double d = u[i + 1] - u[i];
      sum += d;
      ++h.spacings;
      if (d < 0.05) ++small;
      const int b = static_cast<int>(d / h.bin_width);
      if (b < opt.bins) ++counts[b];
      else ++beyond;
    }
    // Pair correlation: centres inside the window, partners anywhere.
    for (int i = 0; i < s.n; ++i) {
      if (lam[i] < lo || lam[i] > hi) continue;
      ++centres;
      for (int j = i + 1; j < s.n && u[j] - u[i] < opt.pair_max; ++j)
        ++pair_counts[static_cast<int>((u[j] - u[i]) / opt.pair_bin)];
      for (int j = i - 1; j >= 0 && u[i] - u[j] < opt.pair_max; --j)
        ++pair_counts[static_cast<int>((u[i] - u[j]) / opt.pair_bin)];
    }
  }
  if (h.spacings == 0) throw std::invalid_argument("spacing_statistics: no spacings inside the window");
  const double total = static_cast<double>(h.spacings);
  h.mean_spacing = sum / total;
  h.small_fraction = small / total;
  double tv = 0.0;
  for (int b = 0; b < opt.bins; ++b) {
    const double a = b * h.bin_width, c = a + h.bin_width;
    const double ref_mass = wigner_surmise_cdf(s.beta, c) - wigner_surmise_cdf(s.beta, a);
    const double emp_mass = counts[b] / total;
    tv += std::abs(emp_mass - ref_mass);
    h.centers.push_back(a + 0.5 * h.bin_width);
    h.empirical.push_back(emp_mass / h.bin_width);
    h.reference.push_back(ref_mass / h.bin_width);
  }
  tv += std::abs(beyond / total - (1.0 - wigner_surmise_cdf(s.beta, opt.s_max)));
  h.total_variation = 0.5 * tv;

  for (int b = 0; b < pair_bins; ++b) {
    const double c = (b + 0.5) * opt.pair_bin;
    h.pair_centers.push_back(c);
    // Two neighbours per unit distance on either side at unit density.
    h.pair_correlation.push_back(centres > 0 ? pair_counts[b] / (2.0 * opt.pair_bin * centres) : 0.0);
    const double sk = sine_kernel(c);
    h.pair_reference.push_back(1.0 - sk * sk);
    const double edge = sine_kernel(c + 0.5 * opt.pair_bin);
    if (1.0 - edge * edge < 0.2) h.pair_suppression = std::max(h.pair_suppression, h.pair_correlation.back());
  }
  return h;
}

}  // namespace ulab
