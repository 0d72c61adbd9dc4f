#include <benchmark/benchmark.h>

#include "fedload/common/random.hpp"
#include "fedload/nn/models.hpp"

using namespace fedload;

namespace {

nn::Tensor random_tensor(nn::Shape shape, Rng& rng) {
  nn::Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(1.0, 2.0);
  for (double& v : t.values()) v = u(rng);
  return t;
}

nn::ModelDims dims_for(benchmark::State& state) {
  nn::ModelDims dims = nn::ModelDims::toy();
  dims.hidden = static_cast<std::size_t>(state.range(0));
  return dims;
}

}  // namespace

static void BM_LstmForward(benchmark::State& state) {
  const auto dims = dims_for(state);
  Rng rng(1);
  const auto lstm = nn::LstmLayer::uniform(dims.input_dim, dims.hidden, rng);
  const auto x = random_tensor({32, dims.lookback, dims.input_dim}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lstm.forward(x, nullptr));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_LstmForward)->Arg(16)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_LstmBackward(benchmark::State& state) {
  const auto dims = dims_for(state);
  Rng rng(2);
  const auto lstm = nn::LstmLayer::uniform(dims.input_dim, dims.hidden, rng);
  const auto x = random_tensor({32, dims.lookback, dims.input_dim}, rng);
  nn::LstmLayer::Cache cache;
  lstm.forward(x, &cache);
  const auto dh = random_tensor({32, dims.lookback, dims.hidden}, rng);
  auto grad = nn::LstmLayer::zeros(dims.input_dim, dims.hidden);
  for (auto _ : state) benchmark::DoNotOptimize(lstm.backward(cache, dh, grad));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_LstmBackward)->Arg(16)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_PredictorStep(benchmark::State& state) {
  const auto dims = dims_for(state);
  Rng rng(3);
  const auto model = nn::PredictorParams::init(dims, rng);
  const auto x = random_tensor({32, dims.lookback, dims.input_dim}, rng);
  const auto y = random_tensor({32, dims.horizon}, rng);
  auto grad = nn::PredictorParams::zeros_like(model);
  for (auto _ : state) benchmark::DoNotOptimize(nn::predictor_l1_loss(model, x, y, grad));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_PredictorStep)->Arg(16)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_GeneratorForward(benchmark::State& state) {
  const auto dims = nn::ModelDims::paper();
  Rng rng(4);
  const auto gen = nn::GeneratorParams::init(dims, rng);
  const auto labels = random_tensor({32, dims.horizon}, rng);
  const auto noise = random_tensor({32, dims.noise}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::generator_forward(gen, labels, noise, nullptr));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_GeneratorForward)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
