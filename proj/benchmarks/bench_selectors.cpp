#include <benchmark/benchmark.h>

#include "quickic/datagen.hpp"
#include "quickic/linreg.hpp"
#include "quickic/model_core.hpp"

namespace {

using namespace quickic;

void BM_SoftThresholdDiagonal(benchmark::State& state) {
  double theta = 1.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(soft_threshold_diagonal(theta, 12.0, 2.3));
  }
}
BENCHMARK(BM_SoftThresholdDiagonal);

void BM_QuickICRegression(benchmark::State& state) {
  const auto sample =
      gen_regression(DesignCase::II, static_cast<int>(state.range(0)), 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quick_ic_regression(sample.data, ICSpec::bic()));
  }
}
BENCHMARK(BM_QuickICRegression)->Arg(100)->Arg(300);

void BM_ExhaustiveICRegression(benchmark::State& state) {
  const auto sample =
      gen_regression(DesignCase::II, static_cast<int>(state.range(0)), 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        exhaustive_ic_regression(sample.data, ICSpec::bic(), 4, 8));
  }
}
BENCHMARK(BM_ExhaustiveICRegression)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ALassoPath(benchmark::State& state) {
  const auto sample = gen_regression(DesignCase::III, 300, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alasso_path(sample.data));
  }
}
BENCHMARK(BM_ALassoPath);

}  // namespace

BENCHMARK_MAIN();
