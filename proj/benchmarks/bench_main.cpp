#include <benchmark/benchmark.h>

#include "ril/experiments.hpp"
#include "ril/oracles.hpp"
#include "ril/pmf.hpp"
#include "ril/range_stats.hpp"
#include "ril/site_hash.hpp"

namespace {

void SiteHashInsert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range());
  ril::Xoshiro256pp rng(1, 0, 0);
  std::vector<std::uint64_t> keys(n);
  for (auto& k : keys) k = rng.next() >> 1;
  for (auto _ : state) {
    ril::SiteHashSet set(n);
    for (const auto k : keys) benchmark::DoNotOptimize(set.insert(k));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(SiteHashInsert)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);

void WalkStep(benchmark::State& state) {
  const ril::StepDistribution dist =
      ril::make_lazy(ril::make_simple_walk(2), 0.25);
  ril::WalkStream stream(dist, 7, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(stream.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(WalkStep);

void JointIntersection(benchmark::State& state) {
  const auto n = state.range();
  const ril::StepDistribution dist =
      ril::make_lazy(ril::make_simple_walk(2), 0.25);
  std::uint64_t replicate = 0;
  for (auto _ : state) {
    const auto est = ril::mc_estimate_EJ(dist, 2, n, 1, 11 + replicate++, 1);
    benchmark::DoNotOptimize(est.mean);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(JointIntersection)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void ConvolutionStep(benchmark::State& state) {
  const ril::StepDistribution dist = ril::make_simple_walk(2);
  ril::LatticePmf pmf = ril::LatticePmf::delta_origin(2, static_cast<std::int32_t>(state.range()));
  for (auto _ : state) pmf.convolve(dist);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(ConvolutionStep)->Arg(64)->Arg(256);

void ReturnProbabilitiesAxis(benchmark::State& state) {
  const ril::StepDistribution dist = ril::make_simple_walk(3);
  for (auto _ : state) {
    const auto series = ril::return_probabilities_axis(dist, state.range());
    benchmark::DoNotOptimize(series.back());
  }
}
BENCHMARK(ReturnProbabilitiesAxis)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
