#include <algorithm>
#include <set>

#include "doctest.h"
#include "fedload/common/error.hpp"
#include "fedload/data/windows.hpp"
#include "fedload/nn/serialize.hpp"
#include "fedload/strategies/evaluate.hpp"
#include "fedload/strategies/fedavg.hpp"
#include "fedload/strategies/strategies.hpp"
#include "fedload/strategies/training.hpp"
#include "testing.hpp"

using namespace fedload;
using metrics::Strategy;

namespace {

strategies::TrainConfig quick_config() {
  strategies::TrainConfig cfg;
  cfg.rounds = 3;
  cfg.local_epochs = 1;
  cfg.global_epochs = 1;
  cfg.batch = 64;
  cfg.clients_per_round = 2;
  cfg.fixed_clock = true;
  return cfg;
}

nn::PredictorParams filled(const nn::ModelDims& dims, double value) {
  auto m = nn::PredictorParams::zeros(dims);
  for (auto& b : m.blocks()) b.tensor->fill(value);
  return m;
}

}  // namespace

TEST_CASE("fedavg is permutation invariant") {
  const auto dims = fedload::testing::tiny_dims();
  Rng rng(1);
  std::vector<nn::PredictorParams> models;
  for (int i = 0; i < 4; ++i) models.push_back(nn::PredictorParams::init(dims, rng));
  const auto reference = strategies::fedavg_aggregate(models);
  std::vector<std::size_t> order = {0, 1, 2, 3};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<nn::PredictorParams> shuffled;
    for (std::size_t i : order) shuffled.push_back(models[i]);
    CHECK(strategies::fedavg_aggregate(shuffled) == reference);
  }
}

TEST_CASE("fedavg algebra") {
  const auto dims = fedload::testing::tiny_dims();
  Rng rng(2);
  const auto one = nn::PredictorParams::init(dims, rng);
  CHECK(strategies::fedavg_aggregate(std::vector{one}) == one);
  CHECK(strategies::fedavg_aggregate(std::vector{one, one, one}) == one);
  CHECK(strategies::fedavg_aggregate(std::vector{filled(dims, 0.0), filled(dims, 2.0)}) ==
        filled(dims, 1.0));

  // element-wise mean against a direct loop
  std::vector<nn::PredictorParams> ms;
  for (int i = 0; i < 3; ++i) ms.push_back(nn::PredictorParams::init(dims, rng));
  const auto avg = strategies::fedavg_aggregate(ms);
  const auto out = avg.blocks();
  for (std::size_t b = 0; b < out.size(); ++b) {
    for (std::size_t j = 0; j < out[b].tensor->size(); ++j) {
      const double expect = ((*ms[0].blocks()[b].tensor)[j] + (*ms[1].blocks()[b].tensor)[j] +
                             (*ms[2].blocks()[b].tensor)[j]) / 3.0;
      CHECK((*out[b].tensor)[j] == doctest::Approx(expect).epsilon(1e-15));
    }
  }

  CHECK_THROWS_AS(strategies::fedavg_aggregate(std::vector<nn::PredictorParams>{}), ContractError);
  auto other = nn::ModelDims(dims);
  other.hidden = 6;
  CHECK_THROWS_AS(strategies::fedavg_aggregate(std::vector{one, filled(other, 1.0)}),
                  ContractError);

  std::vector<nn::LinearLayer> heads = {one.head, filled(dims, 3.0).head};
  const auto h = strategies::fedavg_heads(heads);
  CHECK(h.weight.at(0, 0) == doctest::Approx((one.head.weight.at(0, 0) + 3.0) / 2));
}

TEST_CASE("single-client FL round equals isolated training") {
  const auto dims = fedload::testing::tiny_dims();
  const auto shards = fedload::testing::synthetic_shards(dims, 2, 1, 1);
  auto cfg = quick_config();
  cfg.rounds = 1;
  cfg.local_epochs = 3;
  cfg.global_epochs = 3;
  cfg.clients_per_round = 1;
  const auto fl = strategies::train_fl(shards, dims, cfg);
  const auto icl = strategies::train_icl(shards, dims, cfg);
  CHECK(fl.models[0] == icl.models[0]);
}

TEST_CASE("DSCL over one deployment equals isolated training") {
  const auto dims = fedload::testing::tiny_dims();
  const auto series = data::synth_generate({7, 2, 1});
  const std::vector<std::vector<std::size_t>> groups = {{0, 1}};
  const auto local = data::build_shards(series, groups,
                                        {dims.lookback, dims.horizon, 0.8,
                                         data::ScalerScope::kPerDeployment});
  const auto global =
      data::build_shards(series, groups, {dims.lookback, dims.horizon, 0.8, data::ScalerScope::kGlobal});
  std::vector<nn::Tensor> raw = {series[0].features, series[1].features};
  auto cfg = quick_config();
  cfg.global_epochs = 2;
  const auto dscl = strategies::train_dscl(global, raw, dims, cfg);
  const auto icl = strategies::train_icl(local, dims, cfg);
  CHECK(dscl.models[0] == icl.models[0]);
}

TEST_CASE("measured bytes equal the cost formula") {
  const auto dims = fedload::testing::tiny_dims();
  const auto shards = fedload::testing::synthetic_shards(dims, 4, 2, 1);
  for (int bpp : {4, 8}) {
    auto cfg = quick_config();
    cfg.bytes_per_param = bpp;

    const auto fl = strategies::train_fl(shards, dims, cfg);
    const std::int64_t theta = nn::PredictorParams::zeros(dims).param_count() * bpp;
    CHECK(fl.formula_bytes == 2 * theta * 3 * 2);
    CHECK(fl.ledger.bytes_total() == fl.formula_bytes);
    CHECK(fl.ledger.round_bytes().size() == 3);
    for (const auto& r : fl.rounds) CHECK(r.bytes_uplink == r.bytes_downlink);

    const auto kd = strategies::train_kdgen(shards, dims, cfg);
    const std::int64_t head = nn::PredictorParams::zeros(dims).head_param_count() * bpp;
    const std::int64_t omega = nn::GeneratorParams::zeros(dims).param_count() * bpp;
    CHECK(kd.formula_bytes == (2 * head + omega) * 3 * 2);
    CHECK(kd.ledger.bytes_total() == kd.formula_bytes);
    CHECK(kd.ledger.bytes_total() < fl.ledger.bytes_total());

    std::vector<nn::Tensor> raw;
    std::int64_t data_bytes = 0;
    for (const auto& s : data::synth_generate({7, 4, 1})) {
      raw.push_back(s.features);
      data_bytes += static_cast<std::int64_t>(s.features.size()) * bpp;
    }
    const auto dscl = strategies::train_dscl(shards, raw, dims, cfg);
    CHECK(dscl.formula_bytes == data_bytes + 4 * theta);
    CHECK(dscl.ledger.bytes_total() == dscl.formula_bytes);

    const auto icl = strategies::train_icl(shards, dims, cfg);
    CHECK(icl.ledger.bytes_total() == 0);
    CHECK(icl.formula_bytes == 0);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto dims = fedload::testing::tiny_dims();
  const auto shards = fedload::testing::synthetic_shards(dims, 4, 2, 1);
  auto cfg = quick_config();
  const auto a = strategies::train_kdgen(shards, dims, cfg);
  cfg.workers = 2;
  const auto b = strategies::train_kdgen(shards, dims, cfg);
  CHECK(a.models == b.models);
  CHECK(a.generator == b.generator);
  const auto c = strategies::train_fl(shards, dims, cfg);
  cfg.workers = 1;
  const auto d = strategies::train_fl(shards, dims, cfg);
  CHECK(c.models == d.models);
}

TEST_CASE("kdgen keeps private extractors and shares the head") {
  const auto dims = fedload::testing::tiny_dims();
  const auto shards = fedload::testing::synthetic_shards(dims, 4, 2, 1);
  const auto kd = strategies::train_kdgen(shards, dims, quick_config());
  REQUIRE(kd.models.size() == 2);
  REQUIRE(kd.generator.has_value());
  CHECK(kd.models[0].head == kd.models[1].head);
  CHECK_FALSE(kd.models[0].lstm == kd.models[1].lstm);
  for (const auto& r : kd.rounds) {
    REQUIRE(r.mixture.has_value());
    double w = 0.0;
    for (const auto& c : r.mixture->components) w += c.weight;
    CHECK(std::abs(w - 1.0) <= 1e-12);
    CHECK(r.generator_loss.has_value());
  }
}

TEST_CASE("round logs round-trip through ndjson") {
  strategies::RoundLog log;
  log.strategy = Strategy::kKdgen;
  log.round = 4;
  log.client_losses = {{0, 0.25}, {3, 0.5}};
  log.bytes_uplink = 10;
  log.bytes_downlink = 20;
  log.mixture = kdgen::GlobalMixture{{{1.5, 0.01, 0.25}, {1.2, 0.02, 0.75}}};
  log.generator_loss = 0.125;
  const std::string line = strategies::to_ndjson(log);
  CHECK(line.find('\n') == std::string::npos);
  const auto back = strategies::parse_round_log(line);
  CHECK(back.round == 4);
  CHECK(back.client_losses == log.client_losses);
  CHECK(back.bytes() == 30);
  CHECK(back.mixture == log.mixture);
  CHECK(back.generator_loss == log.generator_loss);
}

TEST_CASE("client selection") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = strategies::select_clients(20, 7, rng);
    CHECK(s.size() == 7);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 7);
    CHECK(s.back() < 20);
  }
  CHECK_THROWS(strategies::select_clients(3, 4, rng));
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(37, 0);
  strategies::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(strategies::parallel_for(5, 2,
                                           [](std::size_t i) {
                                             if (i == 3) throw DataError("boom");
                                           }),
                  DataError);
}

TEST_CASE("evaluation against hand-computed persistence") {
  const auto dims = fedload::testing::tiny_dims();
  const auto shards = fedload::testing::synthetic_shards(dims, 2, 1, 1);
  const auto& shard = shards[0];
  const auto persist = strategies::persistence_predictions(shard.test);
  for (std::size_t i = 0; i < shard.test.size(); ++i) {
    for (std::size_t k = 0; k < dims.horizon; ++k) {
      CHECK(persist.at(i, k) == shard.test.x.at(i, dims.lookback - 1, data::kLoad));
    }
  }
  const std::vector<std::size_t> horizons = {1, 4};
  const auto eval = strategies::evaluate_predictions(persist, shard, horizons);
  CHECK(eval.mae_scaled == eval.persistence_scaled);
  double brute = 0.0;
  for (std::size_t i = 0; i < shard.test.size(); ++i) {
    brute += std::abs(persist.at(i, 3) - shard.test.y.at(i, 3));
  }
  brute /= static_cast<double>(shard.test.size());
  CHECK(eval.mae_scaled[1] == doctest::Approx(brute).epsilon(1e-13));
  CHECK(eval.mae_mb[1] ==
        doctest::Approx(brute * shard.scaler.range(data::kLoad) / 1e6).epsilon(1e-13));

  const std::vector<std::size_t> too_far = {5};
  CHECK_THROWS_AS(strategies::evaluate_predictions(persist, shard, too_far), ContractError);
  auto empty = shard;
  empty.test = {};
  CHECK_THROWS_AS(strategies::evaluate_predictions(persist, empty, horizons), ContractError);
}
