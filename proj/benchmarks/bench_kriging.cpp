#include "sivae/kriging.hpp"
#include "sivae/random_fields.hpp"

#include <benchmark/benchmark.h>

using namespace sivae;

static void BM_OrdinaryKriging(benchmark::State& state) {
  const Matrix loc = sample_uniform_locations(2000, {}, 1);
  const Vector vals = Vector::Random(2000);
  const Matrix targets = sample_uniform_locations(100, {}, 2);
  const VariogramModel vgm{VariogramFamily::matern, 1.0, 10.0, 0.1, 1.5};
  const auto neighbours = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ordinary_kriging(loc, vals, targets, vgm, neighbours));
  state.SetItemsProcessed(state.iterations() * targets.rows());
}
BENCHMARK(BM_OrdinaryKriging)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
