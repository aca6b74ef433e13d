#include "sivae/ivae.hpp"

#include <benchmark/benchmark.h>

using namespace sivae;

static void BM_ElboStep(benchmark::State& state) {
  const int d = 3, m = 400;
  const auto b = state.range(0);
  TrainConfig cfg;
  const IvaeModel model = IvaeModel::create(d, m, cfg);
  Batch batch{Matrix::Random(b, d), std::vector<int>(static_cast<std::size_t>(b))};
  for (Eigen::Index i = 0; i < b; ++i) batch.segments[static_cast<std::size_t>(i)] = static_cast<int>((i * 37) % m);
  const Matrix eps = Matrix::Random(b, d);
  IvaeGrad grad = IvaeGrad::like(model);
  for (auto _ : state) benchmark::DoNotOptimize(elbo(model, batch, eps, &grad));
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_ElboStep)->Arg(64)->Arg(256);
