// Hot-path benchmarks: innovations filter, discrete filter step, quantizer
// construction and lookup.
#include <benchmark/benchmark.h>

#include "hmq/hmq.hpp"

namespace {

hmq::ModelParams default_params() {
  hmq::ModelParams p;
  p.a = 0.5;
  return p;
}

void bm_innovations_filter(benchmark::State& state) {
  const hmq::ModelParams params = default_params();
  const hmq::PathSample path =
      hmq::sample_path(params, hmq::Hypothesis::H1, static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmq::loglik_h1(path.observations, params));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_innovations_filter)->Arg(1000)->Arg(20000);

void bm_discrete_filter(benchmark::State& state) {
  const hmq::ModelParams params = default_params();
  const hmq::StateGrid grid = hmq::build_state_grid(params);
  const hmq::PointDensity density = hmq::density_uniform(params.y_lo, params.y_hi);
  const hmq::Quantizer q = hmq::build_quantizer(density, 64);
  const hmq::QuantizedKernel kernel = hmq::build_kernel(q, params, grid);
  const hmq::PathSample path =
      hmq::sample_path(params, hmq::Hypothesis::H0, static_cast<int>(state.range(0)), 7);
  std::vector<int> z(path.observations.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = hmq::quantize(q, path.observations[i]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmq::loglik_h1_quantized(z, kernel, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_discrete_filter)->Arg(200)->Arg(2000);

void bm_build_quantizer(benchmark::State& state) {
  const hmq::ModelParams params = default_params();
  const hmq::PointDensity density = hmq::density_iid(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmq::build_quantizer(density, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(bm_build_quantizer)->Arg(16)->Arg(256);

void bm_quantize(benchmark::State& state) {
  const hmq::ModelParams params = default_params();
  const hmq::Quantizer q = hmq::build_quantizer(hmq::density_iid(params), 256);
  const hmq::PathSample path = hmq::sample_path(params, hmq::Hypothesis::H0, 4096, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmq::quantize(q, path.observations[i]));
    i = (i + 1) % path.observations.size();
  }
}
BENCHMARK(bm_quantize);

void bm_window_score(benchmark::State& state) {
  const hmq::ModelParams params = default_params();
  const hmq::ScoreWeights weights(30, 30, params);
  const hmq::PathSample path = hmq::sample_path(params, hmq::Hypothesis::H0, 200, 7);
  const std::span<const double> window(path.observations.data(), 61);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weights.score(window));
  }
}
BENCHMARK(bm_window_score);

}  // namespace

BENCHMARK_MAIN();
