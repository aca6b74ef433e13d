#include "sivae/bessel.hpp"
#include "sivae/random_fields.hpp"

#include <benchmark/benchmark.h>

using namespace sivae;

static void BM_BesselK(benchmark::State& state) {
  const double nu = static_cast<double>(state.range(0)) / 10.0;
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_k(nu, x));
    x = x < 50.0 ? x * 1.3 : 0.01;
  }
}
BENCHMARK(BM_BesselK)->Arg(1)->Arg(5)->Arg(25)->Arg(49);

static void BM_MaternCovarianceMatrix(benchmark::State& state) {
  const Matrix loc = sample_uniform_locations(state.range(0), {}, 1);
  const MaternParams p{1.3, 12.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        covariance_matrix(loc, [&](const Point& a, const Point& b) { return matern_correlation((a - b).norm(), p); }));
  }
}
BENCHMARK(BM_MaternCovarianceMatrix)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
