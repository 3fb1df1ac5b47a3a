#include <benchmark/benchmark.h>

#include "wavecheck/rng.hpp"
#include "wavecheck/spectrum.hpp"
#include "wavecheck/tree_ball.hpp"
#include "wavecheck/wave.hpp"

using namespace wavecheck;

namespace {

const WaveParams kParams{3, 1.0};

void BM_covariance_star(benchmark::State& state) {
  const BallIndex ball = build_ball(BallKind::star, 3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(covariance_matrix(ball, kParams));
  }
  state.SetLabel(std::to_string(ball.size()) + " vertices");
}
BENCHMARK(BM_covariance_star)->DenseRange(1, 5);

void BM_direct_draw(benchmark::State& state) {
  const BallIndex ball = build_ball(BallKind::star, 3, static_cast<int>(state.range(0)));
  DirectWaveSampler sampler(ball, kParams);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_direct_draw)->DenseRange(1, 5);

void BM_markov_draw(benchmark::State& state) {
  const BallIndex ball = build_ball(BallKind::star, 3, static_cast<int>(state.range(0)));
  MarkovWaveSampler sampler(ball, kParams);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_markov_draw)->DenseRange(1, 5);

void BM_delta_closed(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_k(kParams, k, false).delta_closed);
  }
}
BENCHMARK(BM_delta_closed)->Arg(4)->Arg(8)->Arg(12);

void BM_delta_brute(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_k(kParams, k, true).delta_brute);
  }
}
BENCHMARK(BM_delta_brute)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_eigenspace_basis(benchmark::State& state) {
  const BallIndex ball = build_ball(BallKind::star, 3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigenspace_basis(ball, 1.0));
  }
}
BENCHMARK(BM_eigenspace_basis)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
