#include <benchmark/benchmark.h>

#include "mcde/chain.hpp"
#include "mcde/estimator.hpp"
#include "mcde/fit.hpp"
#include "mcde/outlier.hpp"
#include "mcde/synthdata.hpp"

namespace {

mcde::Sample normal(std::size_t n, std::size_t d) {
  return mcde::sample_product(mcde::DistributionSpec::normal(0.0, 1.0), n, d, 1);
}

void BM_DistanceMatrix(benchmark::State& state) {
  const auto s = normal(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(mcde::distance_matrix(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceMatrix)->RangeMultiplier(4)->Range(128, 2048)->Complexity(benchmark::oNSquared);

void BM_StationaryDistribution(benchmark::State& state) {
  const auto s = normal(static_cast<std::size_t>(state.range(0)), 3);
  const auto d = mcde::distance_matrix(s);
  for (auto _ : state) {
    const auto w = mcde::weight_matrix(d, mcde::Kernel(), 0.4, 1.0);
    benchmark::DoNotOptimize(mcde::stationary_distribution(w));
  }
}
BENCHMARK(BM_StationaryDistribution)->RangeMultiplier(4)->Range(128, 2048);

void BM_PointwiseEstimate(benchmark::State& state) {
  const auto s = normal(static_cast<std::size_t>(state.range(0)), 3);
  const auto d = mcde::distance_matrix(s);
  for (auto _ : state) benchmark::DoNotOptimize(mcde::pointwise_estimate(d, mcde::Kernel(), 0.4, 1.0));
}
BENCHMARK(BM_PointwiseEstimate)->RangeMultiplier(4)->Range(128, 2048);

void BM_McNormalize(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto s = normal(1000, dim);
  const auto m = mcde::build_density_model(s, mcde::ModelOptions{}, 0.4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcde::mc_normalize(
        [&](std::span<const double> x) { return m.unnormalized(x); }, m.domain, mcde::default_mc_samples(dim), 2));
  }
}
BENCHMARK(BM_McNormalize)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void BM_FitDefaultGrid(benchmark::State& state) {
  const auto s = normal(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(mcde::fit_mcde(s, mcde::FitConfig{}));
}
BENCHMARK(BM_FitDefaultGrid)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Knn(benchmark::State& state) {
  const auto s = normal(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(mcde::knn(s, 40));
}
BENCHMARK(BM_Knn)->RangeMultiplier(2)->Range(256, 2048);

} // namespace

BENCHMARK_MAIN();
