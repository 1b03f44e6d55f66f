#include <benchmark/benchmark.h>

#include "condcrop/heatmaps.hpp"
#include "condcrop/optimizer.hpp"
#include "condcrop/proposals.hpp"
#include "condcrop/random.hpp"

namespace cc = condcrop;

static void BM_RegionSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cc::IntegralImage ii(cc::synth_planted({n, n}, {n / 4, n / 4, n / 2, n / 2}, 0.1, 1));
  cc::Rng rng(1);
  for (auto _ : state) {
    const int w = rng.uniform_int(1, n), h = rng.uniform_int(1, n);
    benchmark::DoNotOptimize(ii.region_sum({rng.uniform_int(0, n - w), rng.uniform_int(0, n - h), w, h}));
  }
}
BENCHMARK(BM_RegionSum)->Arg(64)->Arg(256);

static void BM_BuildIntegral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cc::Heatmap h = cc::synth_planted({n, n}, {0, 0, n / 2, n / 2}, 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(cc::IntegralImage(h).total());
}
BENCHMARK(BM_BuildIntegral)->Arg(64)->Arg(256);

static void BM_Optimize(benchmark::State& state) {
  const cc::Dims d{256, 192};
  const cc::HeatmapScorer scorer(cc::synth_planted({64, 48}, {10, 8, 32, 24}, 0.1, 2),
                                 cc::LayoutConstraint::single({40, 40, 60, 30}), {}, d);
  cc::OptimizerConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  cfg.strategy = static_cast<cc::Strategy>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(cc::optimize(scorer.as_function(), d, cc::AspectRatio(4.0 / 3.0), cfg).box);
}
BENCHMARK(BM_Optimize)->ArgsProduct({{100, 500}, {0, 1, 2}});

static void BM_ExhaustiveSearch(benchmark::State& state) {
  const cc::Dims d{1024, 768};
  const cc::HeatmapScorer scorer(cc::synth_planted({64, 48}, {10, 8, 32, 24}, 0.1, 2), {}, {}, d);
  const auto set = cc::generate_proposals(d, cc::AspectRatio(4.0 / 3.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cc::exhaustive_search(scorer.as_function(), set, static_cast<unsigned>(state.range(0))).index);
  }
  state.counters["proposals"] = static_cast<double>(set.boxes.size());
}
BENCHMARK(BM_ExhaustiveSearch)->Arg(1)->Arg(4);
BENCHMARK_MAIN();
