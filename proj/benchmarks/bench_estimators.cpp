#include <benchmark/benchmark.h>

#include "atomdeconv/estimate_f.hpp"
#include "atomdeconv/simulate.hpp"

namespace {

using namespace atomdeconv;

const std::vector<double>& sample_2000() {
  static const std::vector<double> data =
      sample_model(dataset_spec(1, 4.0, 2000, 42));
  return data;
}

void BM_EmpiricalCf(benchmark::State& state) {
  const auto& data = sample_2000();
  const FrequencyGrid grid =
      FrequencyGrid::symmetric(4.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(empirical_cf(data, grid));
  }
}
BENCHMARK(BM_EmpiricalCf)->Arg(1025)->Arg(4097);

void BM_PHatRaw(benchmark::State& state) {
  const auto& data = sample_2000();
  const NoiseModel noise = NoiseModel::gamma(2.0, 1.0);
  const FlatTopKernel kernel(1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(p_hat_raw(data, noise, kernel, 0.5));
  }
}
BENCHMARK(BM_PHatRaw);

void BM_EstimatePAdaptive(benchmark::State& state) {
  const auto data = sample_model(dataset_spec(1, 4.0, state.range(0), 42));
  const NoiseModel noise = NoiseModel::gamma(2.0, 1.0);
  EstimatorConfig config;
  config.s_max = 4.0;
  config.beta = 9.0;
  config.eps = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_p_adaptive(data, noise, config));
  }
}
BENCHMARK(BM_EstimatePAdaptive)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EstimateFAdaptive(benchmark::State& state) {
  const auto data = sample_model(dataset_spec(1, 4.0, state.range(0), 42));
  const NoiseModel noise = NoiseModel::gamma(2.0, 1.0);
  FEstimatorConfig config;
  config.est.s_max = 4.0;
  config.est.beta = 9.0;
  config.est.eps = 0.5;
  config.x_grid = {0.0, 2.0, 4.0, 6.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_f_adaptive(data, noise, config));
  }
}
BENCHMARK(BM_EstimateFAdaptive)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Simpson(benchmark::State& state) {
  const FrequencyGrid grid = FrequencyGrid::symmetric(10.0, 4097);
  ComplexSeries series{grid, std::vector<complex>(grid.n_points())};
  for (int i = 0; i < grid.n_points(); ++i) {
    series.values[i] = gamma_cf(2.0, 1.0, grid.point(i));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(simpson(series));
  }
}
BENCHMARK(BM_Simpson);

}  // namespace

BENCHMARK_MAIN();
