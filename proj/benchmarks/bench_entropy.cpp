#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "wavecheck/entropy.hpp"
#include "wavecheck/rng.hpp"

using namespace wavecheck;

namespace {

Eigen::MatrixXd gaussian_cloud(int n, int dim, Rng& rng) {
  Eigen::MatrixXd samples(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) samples(i, j) = rng.normal();
  }
  return samples;
}

void BM_knn_entropy(benchmark::State& state) {
  Rng rng(1);
  const Eigen::MatrixXd cloud = gaussian_cloud(static_cast<int>(state.range(0)), 2, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn_entropy(cloud).value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_knn_entropy)->Arg(2000)->Arg(8000)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_rounded_pmf(benchmark::State& state) {
  const int a = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rounded_normal_pmf(0.3, 1.0, a));
  }
}
BENCHMARK(BM_rounded_pmf)->Arg(2)->Arg(8)->Arg(32);

void BM_discretize(benchmark::State& state) {
  Rng rng(1);
  const DiscretizationParams dp{0.5, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(discretize_t(0.41, dp, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_discretize);

void BM_mixture_fisher(benchmark::State& state) {
  GaussianMixture gm;
  gm.weights = {0.5, 0.3, 0.2};
  gm.means.resize(3, Eigen::VectorXd::Zero(2));
  gm.means[0] << -1.0, 0.5;
  gm.means[1] << 1.2, -0.4;
  gm.means[2] << 0.0, 1.5;
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 0.3, 0.3, 0.8;
  gm.covs = {c, c, c};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixture_fisher(gm));
  }
}
BENCHMARK(BM_mixture_fisher)->Unit(benchmark::kMillisecond);

void BM_ladder(benchmark::State& state) {
  const long long samples = state.range(0);
  for (auto _ : state) {
    Rng rng(1);
    const auto sampler = [](Rng& r) {
      return Eigen::VectorXd::Constant(1, r.normal()).eval();
    };
    benchmark::DoNotOptimize(
        discretization_ladder_check(sampler, 1, 1.0, {4, 16}, samples, std::nullopt, rng));
  }
  state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_ladder)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
