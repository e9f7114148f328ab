// Microbenchmarks for the hot paths: Chernoff conjugate evaluation, the
// finite-resolution rate functional, level-set distance solves, and the
// simulation samplers.
#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "cedf/blocks.hpp"
#include "cedf/chernoff.hpp"
#include "cedf/compound_poisson.hpp"
#include "cedf/grid.hpp"
#include "cedf/laplace.hpp"
#include "cedf/model.hpp"
#include "cedf/rate.hpp"
#include "cedf/rng.hpp"

namespace {

cedf::ChernoffFunction unit_chern() {
  return cedf::ChernoffFunction(
      cedf::laplace_transform(cedf::ModelSpec::constant(1, 1, {0.5}, {1.0})));
}

cedf::ChernoffFunction gaussian_chern() {
  return cedf::ChernoffFunction(cedf::laplace_transform(
      cedf::ModelSpec::gaussian(1, 1, {0.5}, {0.3}, {0.0}, {1.2})));
}

void BM_ChernoffValueUnit(benchmark::State& state) {
  const cedf::ChernoffFunction chern = unit_chern();
  double x = 1.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chern.value1(x));
  }
}
BENCHMARK(BM_ChernoffValueUnit);

void BM_ChernoffValueGaussian(benchmark::State& state) {
  const cedf::ChernoffFunction chern = gaussian_chern();
  double x = 2.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chern.value1(x));
  }
}
BENCHMARK(BM_ChernoffValueGaussian);

void BM_ChernoffLevelRoots(benchmark::State& state) {
  const cedf::ChernoffFunction chern = unit_chern();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cedf::chernoff_level_roots(chern, 0.5));
  }
}
BENCHMARK(BM_ChernoffLevelRoots);

void BM_RateP(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const cedf::ChernoffFunction chern = unit_chern();
  const cedf::DyadicGrid grid(p, 1);
  cedf::Rng rng(42);
  const cedf::GridFunction g =
      cedf::random_slope_function(grid, 1, 0.2, 2.5, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cedf::rate_p(g, chern));
  }
}
BENCHMARK(BM_RateP)->Arg(2)->Arg(4)->Arg(6);

void BM_DistanceToLevelSet(benchmark::State& state) {
  const cedf::ChernoffFunction chern = unit_chern();
  const cedf::RateLevelSet set(chern, 0.5);
  const cedf::DyadicGrid grid(3, 1);
  cedf::Rng rng(7);
  const cedf::GridFunction g =
      cedf::random_slope_function(grid, 1, 0.5, 2.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cedf::distance_to_level_set(g, set, 1e-3));
  }
}
BENCHMARK(BM_DistanceToLevelSet);

void BM_SampleBatch(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const cedf::ModelSpec m =
      cedf::ModelSpec::gaussian(1, 1, {0.5}, {1.0}, {2.0}, {0.5}, {0.8});
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cedf::sample_batch(m, n, seed++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleBatch)->Arg(1 << 10)->Arg(1 << 14);

void BM_CompoundPoissonWindowed(benchmark::State& state) {
  const cedf::ModelSpec m =
      cedf::ModelSpec::bounded(1, 1, {0.25}, {-0.5}, {2.0}, {0.8});
  cedf::Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cedf::sample_compound_poisson_windowed(m, 0.1, 10.0, rng));
  }
}
BENCHMARK(BM_CompoundPoissonWindowed);

void BM_PoissonizedIncrement(benchmark::State& state) {
  const cedf::ModelSpec m =
      cedf::ModelSpec::constant(1, 1, {0.25}, {1.0});
  std::vector<cedf::CompoundPoissonRealization> reals;
  reals.reserve(100);
  cedf::Rng rng(3);
  for (int r = 0; r < 100; ++r) {
    reals.push_back(cedf::sample_compound_poisson_windowed(m, 0.125, 8.0, rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cedf::poissonized_increment(reals, m, 0.125, 3, false));
  }
}
BENCHMARK(BM_PoissonizedIncrement);

void BM_OuterBlockSchedule(benchmark::State& state) {
  const cedf::BlockSchedule outer = cedf::BlockSchedule::outer();
  for (auto _ : state) {
    std::uint64_t acc = 0;
    for (std::uint64_t k = 1; k <= 400; ++k) acc ^= outer.n(k);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_OuterBlockSchedule);

}  // namespace

BENCHMARK_MAIN();
