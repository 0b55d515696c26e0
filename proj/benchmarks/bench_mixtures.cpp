#include <benchmark/benchmark.h>

#include "quickic/datagen.hpp"
#include "quickic/factor_analysis.hpp"
#include "quickic/gaussian_mixture.hpp"
#include "quickic/mfa.hpp"

namespace {

using namespace quickic;

void BM_FAEMFit(benchmark::State& state) {
  const auto sample = gen_fa(static_cast<int>(state.range(0)), 42);
  FAFitOptions opts;
  opts.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fa_em_fit(sample.data, 5, opts));
  }
}
BENCHMARK(BM_FAEMFit)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_QuickBICFA(benchmark::State& state) {
  const auto sample = gen_fa(100, 42);
  QuickBICFAOptions opts;
  opts.em.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quick_bic_fa(sample.data, 8, opts));
  }
}
BENCHMARK(BM_QuickBICFA)->Unit(benchmark::kMillisecond);

void BM_QuickMMLGMMTriangle(benchmark::State& state) {
  const auto sample = gen_triangle(600, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quick_mml_gmm(sample.data, 20, 7));
  }
}
BENCHMARK(BM_QuickMMLGMMTriangle)->Unit(benchmark::kMillisecond);

void BM_QuickMMLMFASpiral(benchmark::State& state) {
  const Eigen::MatrixXd data = gen_spiral(900, 1.0, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quick_mml_mfa(data, 30, 3, 7));
  }
}
BENCHMARK(BM_QuickMMLMFASpiral)->Unit(benchmark::kMillisecond);

}  // namespace
