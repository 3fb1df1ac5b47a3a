#include <benchmark/benchmark.h>

#include "wavecheck/eigenlab.hpp"
#include "wavecheck/graph.hpp"
#include "wavecheck/lift.hpp"
#include "wavecheck/rng.hpp"
#include "wavecheck/tree_ball.hpp"

using namespace wavecheck;

namespace {

void BM_random_regular(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(random_regular(n, 3, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_random_regular)->Arg(1000)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_dense_values(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const RegularGraph g = random_regular(n, 3, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigendecompose(g, EigMode::dense_values));
  }
}
BENCHMARK(BM_dense_values)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_extreme_eigs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const RegularGraph g = random_regular(n, 3, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigendecompose(g, EigMode::extreme));
  }
}
BENCHMARK(BM_extreme_eigs)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_sample_lift(benchmark::State& state) {
  Rng rng(1);
  const RegularGraph g = random_regular(4000, 3, rng);
  const BallIndex ball = build_ball(BallKind::star, 3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_lift(g, ball, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_sample_lift)->DenseRange(1, 4);

void BM_local_stats(benchmark::State& state) {
  Rng rng(1);
  const RegularGraph g = random_regular(2000, 3, rng);
  const SpectralData sd = eigendecompose(g, EigMode::dense);
  int best = 0;
  for (int i = 0; i < g.n; ++i) {
    if (std::abs(sd.eigenvalues(i) - 1.0) < std::abs(sd.eigenvalues(best) - 1.0)) best = i;
  }
  const BallIndex ball = build_ball(BallKind::star, 3, 1);
  const std::int64_t m = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        local_stats(g, sd.eigenvectors.col(best), sd.eigenvalues(best), ball, m, rng));
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_local_stats)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
