#include <benchmark/benchmark.h>

#include "estim/core_math/linalg.hpp"
#include "estim/core_math/rng.hpp"
#include "estim/harness/models.hpp"
#include "estim/neural/network.hpp"
#include "estim/sequential/bootstrap.hpp"
#include "estim/simulators/spatial.hpp"
#include "estim/simulators/univariate.hpp"

using namespace estim;

static void BM_Cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(1);
  Tensor g = Tensor::matrix(n, n);
  for (auto& v : g.values()) v = rng.normal();
  Tensor a = matmul(g, transpose(g));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += n;
  for (auto _ : state) benchmark::DoNotOptimize(cholesky(a));
}
BENCHMARK(BM_Cholesky)->Arg(64)->Arg(256);

static void BM_MlpForward(benchmark::State& state) {
  const auto net = nn::initialize(nn::NetworkSpec::mlp(20, 50, 1), 1);
  RngStream rng(2);
  Tensor x = Tensor::matrix(static_cast<std::size_t>(state.range(0)), 20);
  for (auto& v : x.values()) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(100)->Arg(2000);

static void BM_Cnn2dBackprop(benchmark::State& state) {
  const auto net = nn::initialize(nn::NetworkSpec::cnn2d(16, 16, {16, 8}, 3, 4, 2), 1);
  RngStream rng(3);
  Tensor x({100, 16, 16});
  for (auto& v : x.values()) v = rng.normal();
  Tensor y = Tensor::matrix(100, 2);
  for (auto _ : state) benchmark::DoNotOptimize(nn::backprop(net, x, y));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Cnn2dBackprop);

static void BM_BrownResnick16(benchmark::State& state) {
  const sim::BrownResnickSimulator br({6.2, 1.0}, sim::Grid2D{16, 16, 1.0});
  RngStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(br.sample(rng));
}
BENCHMARK(BM_BrownResnick16);

static void BM_Svol(benchmark::State& state) {
  RngStream rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::sim_svol({0.8, 6.0, 0.1}, static_cast<std::size_t>(state.range(0)), rng));
  }
}
BENCHMARK(BM_Svol)->Arg(1000)->Arg(5000);

static void BM_GaussBootstrap(benchmark::State& state) {
  const harness::GaussVarModel model(1.0, 20);
  const auto net = nn::initialize(nn::NetworkSpec::mlp(20, 50, 1), 1);
  const std::vector<double> theta{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(seq::bootstrap_uncertainty(net, model, theta, 2000, RngStream(6)));
  }
}
BENCHMARK(BM_GaussBootstrap);
BENCHMARK_MAIN();
