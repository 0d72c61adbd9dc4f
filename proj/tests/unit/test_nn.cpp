#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "fedload/common/error.hpp"
#include "fedload/nn/adam.hpp"
#include "fedload/nn/loss.hpp"
#include "fedload/nn/models.hpp"
#include "fedload/nn/serialize.hpp"
#include "testing.hpp"

using namespace fedload;
using fedload::testing::check_gradient;
using fedload::testing::project;
using fedload::testing::random_tensor;

constexpr double kGradTol = 1e-4;

TEST_CASE("tensor shape contract") {
  nn::Tensor a({2, 3}, 1.0);
  nn::Tensor b({3, 2}, 1.0);
  CHECK(a.size() == 6);
  CHECK_THROWS_AS(a += b, ContractError);
  CHECK_THROWS_AS(nn::Tensor({2, 2}, std::vector<double>{1, 2, 3}), ContractError);
  a *= 2.0;
  CHECK(a.at(1, 2) == 2.0);
  a[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(a.all_finite());
}

TEST_CASE("linear layer gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (bool bias : {true, false}) {
      Rng rng(seed);
      auto layer = nn::LinearLayer::uniform(4, 3, bias, rng);
      auto x = random_tensor({5, 4}, rng);
      const auto r = random_tensor({5, 3}, rng);
      auto grad = nn::LinearLayer::zeros(4, 3, bias);
      const nn::Tensor dx = layer.backward(x, r, grad);

      nn::ParamBlocks params;
      layer.append_blocks("fc", params);
      nn::ConstParamBlocks grads;
      std::as_const(grad).append_blocks("fc", grads);
      auto loss = [&] { return project(layer.forward(x), r); };
      CHECK(check_gradient(params, grads, loss).max_rel_error < kGradTol);
      CHECK(check_gradient(x, dx, loss).max_rel_error < kGradTol);
    }
  }
}

TEST_CASE("lstm gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    auto lstm = nn::LstmLayer::uniform(3, 4, rng);
    auto x = random_tensor({2, 5, 3}, rng);
    const auto r = random_tensor({2, 5, 4}, rng);
    nn::LstmLayer::Cache cache;
    lstm.forward(x, &cache);
    auto grad = nn::LstmLayer::zeros(3, 4);
    const nn::Tensor dx = lstm.backward(cache, r, grad);

    nn::ParamBlocks params;
    lstm.append_blocks("lstm", params);
    nn::ConstParamBlocks grads;
    std::as_const(grad).append_blocks("lstm", grads);
    auto loss = [&] { return project(lstm.forward(x, nullptr), r); };
    const auto res = check_gradient(params, grads, loss);
    CHECK(res.checked == static_cast<std::size_t>(lstm.param_count()));
    CHECK(res.max_rel_error < kGradTol);
    CHECK(check_gradient(x, dx, loss).max_rel_error < kGradTol);
  }
}

TEST_CASE("predictor and generator gradients match central differences") {
  const auto dims = fedload::testing::tiny_dims();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    auto model = nn::PredictorParams::init(dims, rng);
    const auto x = random_tensor({3, dims.lookback, dims.input_dim}, rng, 1.0, 2.0);
    const auto r = random_tensor({3, dims.horizon}, rng);
    nn::PredictorCache cache;
    nn::predictor_forward(model, x, &cache);
    auto grad = nn::PredictorParams::zeros_like(model);
    nn::predictor_backward(model, cache, r, grad);
    auto loss = [&] { return project(nn::predictor_forward(model, x).prediction, r); };
    CHECK(check_gradient(model.blocks(), std::as_const(grad).blocks(), loss).max_rel_error <
          kGradTol);

    auto gen = nn::GeneratorParams::init(dims, rng);
    const auto labels = random_tensor({4, dims.horizon}, rng, 1.0, 2.0);
    const auto noise = random_tensor({4, dims.noise}, rng);
    const auto rz = random_tensor({4, dims.latent}, rng);
    nn::GeneratorCache gcache;
    nn::generator_forward(gen, labels, noise, &gcache);
    auto ggrad = nn::GeneratorParams::zeros_like(gen);
    nn::generator_backward(gen, gcache, rz, ggrad);
    auto gloss = [&] { return project(nn::generator_forward(gen, labels, noise), rz); };
    CHECK(check_gradient(gen.blocks(), std::as_const(ggrad).blocks(), gloss).max_rel_error <
          kGradTol);
  }
}

TEST_CASE("predictor l1 loss gradient away from kinks") {
  const auto dims = fedload::testing::tiny_dims();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    auto model = nn::PredictorParams::init(dims, rng);
    const auto x = random_tensor({3, dims.lookback, dims.input_dim}, rng, 1.0, 2.0);
    const auto y =
        fedload::testing::offset_targets(nn::predictor_forward(model, x).prediction, rng);
    auto grad = nn::PredictorParams::zeros_like(model);
    nn::predictor_l1_loss(model, x, y, grad);
    auto loss = [&] {
      auto scratch = nn::PredictorParams::zeros_like(model);
      return nn::predictor_l1_loss(model, x, y, scratch);
    };
    CHECK(check_gradient(model.blocks(), std::as_const(grad).blocks(), loss).max_rel_error <
          kGradTol);
  }
}

TEST_CASE("l1 loss against a brute-force loop") {
  Rng rng(3);
  auto pred = random_tensor({4, 5}, rng);
  auto target = random_tensor({4, 5}, rng);
  target[7] = pred[7];
  const auto res = nn::l1_loss(pred, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - target[i]);
  CHECK(res.value == doctest::Approx(sum / 20.0).epsilon(1e-15));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    const double expect = d > 0 ? 1.0 / 20 : (d < 0 ? -1.0 / 20 : 0.0);
    CHECK(res.grad[i] == expect);
  }
  CHECK_THROWS_AS(nn::l1_loss(pred, nn::Tensor({5, 4})), ContractError);
  CHECK_THROWS_AS(nn::l1_loss(nn::Tensor({0, 4}), nn::Tensor({0, 4})), ContractError);
}

TEST_CASE("adam matches a scalar reference implementation") {
  Rng rng(11);
  nn::Tensor p = random_tensor({6}, rng);
  std::vector<double> ref(p.values().begin(), p.values().end());
  std::vector<double> m(6, 0.0), v(6, 0.0);
  nn::AdamState state;
  const double lr = 0.05;
  for (int t = 1; t <= 4; ++t) {
    const nn::Tensor g = random_tensor({6}, rng);
    nn::adam_step(nn::ParamBlocks{{"p", &p}}, nn::ConstParamBlocks{{"p", &g}}, state, lr);
    for (std::size_t i = 0; i < 6; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  CHECK(state.step == 4);
  for (std::size_t i = 0; i < 6; ++i) CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("adam rejects non-finite gradients naming the block") {
  nn::Tensor p({3}, 1.0);
  nn::Tensor g({3}, 0.5);
  g[1] = std::numeric_limits<double>::infinity();
  nn::AdamState state;
  try {
    nn::adam_step(nn::ParamBlocks{{"head.bias", &p}}, nn::ConstParamBlocks{{"head.bias", &g}},
                  state, 0.01);
    FAIL("expected a throw");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("head.bias") != std::string::npos);
  }
  CHECK(p == nn::Tensor({3}, 1.0));
}

TEST_CASE("blob serialization") {
  Rng rng(5);
  const auto dims = fedload::testing::tiny_dims();
  const auto model = nn::PredictorParams::init(dims, rng);

  SUBCASE("float64 round-trips exactly") {
    const nn::Blob blob = nn::to_blob(model, 8);
    auto back = nn::PredictorParams::zeros(dims);
    nn::from_blob(back, blob);
    CHECK(back == model);
    CHECK(nn::payload_bytes(blob) == static_cast<std::size_t>(model.param_count() * 8));
  }
  SUBCASE("float32 payload is four bytes per parameter") {
    const nn::Blob blob = nn::to_blob(model, 4);
    const auto info = nn::inspect_blob(blob);
    CHECK(info.payload_bytes == static_cast<std::size_t>(model.param_count() * 4));
    CHECK(info.header_bytes + info.payload_bytes == blob.size());
    CHECK(info.blocks.size() == model.blocks().size());
    auto back = nn::PredictorParams::zeros(dims);
    nn::from_blob(back, blob);
    const auto a = model.blocks();
    const auto b = std::as_const(back).blocks();
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a[i].tensor->size(); ++j) {
        CHECK((*b[i].tensor)[j] == static_cast<double>(static_cast<float>((*a[i].tensor)[j])));
      }
    }
  }
  SUBCASE("corrupt blobs are rejected") {
    nn::Blob blob = nn::to_blob(model, 4);
    nn::Blob bad_magic = blob;
    bad_magic[0] = 'X';
    CHECK_THROWS(nn::inspect_blob(bad_magic));
    nn::Blob truncated(blob.begin(), blob.end() - 3);
    CHECK_THROWS(nn::inspect_blob(truncated));
    CHECK_THROWS(nn::to_blob(model, 2));
    auto other = nn::PredictorParams::zeros({3, 5, 4, 6, 4, 3, 6});
    CHECK_THROWS(nn::from_blob(other, blob));
  }
}

TEST_CASE("parameter counts at paper scale") {
  const auto dims = nn::ModelDims::paper();
  const auto gen = nn::GeneratorParams::zeros(dims);
  CHECK(gen.param_count() == 26368);
  const auto model = nn::PredictorParams::zeros(dims);
  CHECK(std::abs(static_cast<double>(model.param_count()) - 953342.0) <= 0.01 * 953342.0);
  // 4H(d + H) + 8H + H*z + z + z*s + s
  const std::int64_t h = 480, d = 4, z = 40, s = 30;
  CHECK(model.param_count() == 4 * h * (d + h) + 8 * h + h * z + z + z * s + s);
  CHECK(model.head_param_count() == z * s + s);
}

TEST_CASE("mac counts are consistent with layer shapes") {
  const auto dims = nn::ModelDims::paper();
  const auto model = nn::PredictorParams::zeros(dims);
  const std::int64_t h = 480, d = 4, z = 40, s = 30, l = 60;
  CHECK(model.lstm.mac_count(60) == l * 4 * (d * h + h * h));
  CHECK(model.mac_count(60) == model.lstm.mac_count(60) + h * z + z * s);
  const auto gen = nn::GeneratorParams::zeros(dims);
  CHECK(gen.mac_count() == (30 + 32) * 256 + 256 * 40);
}

TEST_CASE("predictor rejects non-finite input") {
  const auto dims = fedload::testing::tiny_dims();
  Rng rng(1);
  const auto model = nn::PredictorParams::init(dims, rng);
  auto x = random_tensor({1, dims.lookback, dims.input_dim}, rng);
  x[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nn::predictor_forward(model, x), ContractError);
  CHECK_THROWS_AS(nn::predictor_forward(model, nn::Tensor({1, dims.lookback, 2})),
                  ContractError);
}
