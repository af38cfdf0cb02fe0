#include "ulab/experiments.hpp"
#include "ulab/sampler.hpp"

#include <benchmark/benchmark.h>

using namespace ulab;

namespace {

const Potential& quartic() {
  static const Potential v({0.0, 0.0, 1.0 / 12.0});
  return v;
}

void BM_Equilibrium(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_conditions(quartic()));
}
BENCHMARK(BM_Equilibrium)->Unit(benchmark::kMillisecond);

void BM_Basis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_basis(quartic(), n));
}
BENCHMARK(BM_Basis)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MomentMatrix(benchmark::State& state) {
  const auto b = build_basis(quartic(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(moment_matrix(b));
}
BENCHMARK(BM_MomentMatrix)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_KernelPoint(benchmark::State& state) {
  const auto b = build_basis(quartic(), 64);
  const auto m = moment_matrix(b);
  const TracyWidomKernel k(b, m);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.K1(x, -x));
    x = x < 1.0 ? x + 1e-3 : 0.1;
  }
}
BENCHMARK(BM_KernelPoint)->Unit(benchmark::kMicrosecond);

void BM_RCoefficients(benchmark::State& state) {
  const auto eq = compute_P(quartic());
  for (auto _ : state) benchmark::DoNotOptimize(r_coefficients(eq));
}
BENCHMARK(BM_RCoefficients)->Unit(benchmark::kMillisecond);

void BM_MetropolisSweeps(benchmark::State& state) {
  const Potential g({0.0, 0.5});
  SamplerOptions opt;
  opt.burn_in = 0;
  for (auto _ : state) benchmark::DoNotOptimize(metropolis_run(g, 64, 2, 64 * 1000, 1, opt));
  state.SetItemsProcessed(state.iterations() * 64 * 1000);
}
BENCHMARK(BM_MetropolisSweeps)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
