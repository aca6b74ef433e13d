#include "sivae/shap.hpp"

#include <benchmark/benchmark.h>

using namespace sivae;

static void BM_ExactShap(benchmark::State& state) {
  const auto k = state.range(0);
  const Matrix w = Matrix::Random(4, k);
  const ExplainTarget target{[w](const Matrix& rows) -> Matrix { return (rows * w.transpose()).array().tanh(); },
                             Matrix::Random(50, k)};
  const Vector x = Vector::Random(k);
  for (auto _ : state) benchmark::DoNotOptimize(exact_shap(target, x));
}
BENCHMARK(BM_ExactShap)->Arg(5)->Arg(8)->Arg(11)->Unit(benchmark::kMillisecond);

static void BM_KernelShap(benchmark::State& state) {
  const int k = 17;
  const Matrix w = Matrix::Random(6, k);
  const ExplainTarget target{[w](const Matrix& rows) -> Matrix { return (rows * w.transpose()).array().tanh(); },
                             Matrix::Random(50, k)};
  const Vector x = Vector::Random(k);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_shap_values(target, x, static_cast<std::uint64_t>(state.range(0)), 1));
}
BENCHMARK(BM_KernelShap)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
