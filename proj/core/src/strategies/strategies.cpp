#include "fedload/strategies/strategies.hpp"

#include <utility>
#include <algorithm>

#include "fedload/common/error.hpp"
#include "fedload/kdgen/distill.hpp"
#include "fedload/nn/serialize.hpp"
#include "fedload/strategies/fedavg.hpp"
#include "fedload/strategies/training.hpp"
#include "json.hpp"

namespace fedload::strategies {

using nlohmann::json;
using metrics::Strategy;

namespace {

std::int64_t blob_payload(const nn::Blob& blob) {
  return static_cast<std::int64_t>(nn::payload_bytes(blob));
}

void require_trainable(std::span<const data::DeploymentShard> shards) {
  require(!shards.empty(), "no deployments to train on");
  for (const auto& s : shards) {
    if (s.train.size() == 0) {
      throw ContractError("deployment " + std::to_string(s.deployment_id) +
                          " has an empty training split");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Round logs

std::string to_ndjson(const RoundLog& log) {
  json clients = json::array();
  for (const auto& [id, loss] : log.client_losses) {
    clients.push_back({{"deployment_id", id}, {"loss", loss}});
  }
  json j = {{"strategy", std::string(metrics::to_string(log.strategy))},
            {"round", log.round},
            {"clients", clients},
            {"bytes_uplink", log.bytes_uplink},
            {"bytes_downlink", log.bytes_downlink},
            {"bytes", log.bytes()},
            {"ms", log.ms}};
  if (log.mixture) {
    json comps = json::array();
    for (const auto& c : log.mixture->components) {
      comps.push_back({{"mean", c.mean}, {"variance", c.variance}, {"weight", c.weight}});
    }
    j["mixture"] = comps;
  }
  if (log.generator_loss) j["generator_loss"] = *log.generator_loss;
  return j.dump();
}

RoundLog parse_round_log(std::string_view line) {
  RoundLog log;
  try {
    const json j = json::parse(line);
    log.strategy = metrics::parse_strategy(j.at("strategy").get<std::string>());
    log.round = j.at("round").get<std::int64_t>();
    for (const auto& c : j.at("clients")) {
      log.client_losses.emplace_back(c.at("deployment_id").get<int>(), c.at("loss").get<double>());
    }
    log.bytes_uplink = j.at("bytes_uplink").get<std::int64_t>();
    log.bytes_downlink = j.at("bytes_downlink").get<std::int64_t>();
    log.ms = j.at("ms").get<double>();
    if (j.contains("mixture")) {
      kdgen::GlobalMixture m;
      for (const auto& c : j.at("mixture")) {
        m.components.push_back({c.at("mean").get<double>(), c.at("variance").get<double>(),
                                c.at("weight").get<double>()});
      }
      log.mixture = std::move(m);
    }
    if (j.contains("generator_loss")) log.generator_loss = j.at("generator_loss").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("round log: ") + e.what());
  }
  return log;
}

// ---------------------------------------------------------------------------
// Setup

nn::PredictorParams initial_model(const nn::ModelDims& dims, std::uint64_t seed) {
  Rng rng = make_rng(seed, "model-init");
  return nn::PredictorParams::init(dims, rng);
}

nn::GeneratorParams initial_generator(const nn::ModelDims& dims, std::uint64_t seed) {
  Rng rng = make_rng(seed, "generator-init");
  return nn::GeneratorParams::init(dims, rng);
}

std::vector<ClientState> make_clients(std::span<const data::DeploymentShard> shards,
                                      const nn::PredictorParams& initial, std::uint64_t seed) {
  std::vector<ClientState> clients;
  for (const auto& shard : shards) {
    ClientState c;
    c.deployment_id = shard.deployment_id;
    c.shard = &shard;
    c.model = initial;
    c.shuffle_rng = make_rng(seed, "client-shuffle", static_cast<std::uint64_t>(shard.deployment_id));
    c.kd_rng = make_rng(seed, "client-kd", static_cast<std::uint64_t>(shard.deployment_id));
    clients.push_back(std::move(c));
  }
  return clients;
}

// ---------------------------------------------------------------------------
// Federated averaging

FlState make_fl_state(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                      const TrainConfig& config) {
  require_trainable(shards);
  FlState state;
  state.global = initial_model(dims, config.seed);
  state.clients = make_clients(shards, state.global, config.seed);
  state.server_rng = make_rng(config.seed, "server-select");
  return state;
}

RoundLog fl_round(FlState& state, const TrainConfig& config, metrics::CostLedger& ledger) {
  RoundLog log;
  log.strategy = Strategy::kFl;
  log.round = state.round;
  {
    metrics::ScopedTimer timer(ledger, "round " + std::to_string(state.round));
    const auto selected =
        select_clients(state.clients.size(), config.clients_per_round, state.server_rng);

    // Push: one broadcast blob, received by every selected client.
    const nn::Blob down = nn::to_blob(state.global, config.bytes_per_param);
    log.bytes_downlink = blob_payload(down) * static_cast<std::int64_t>(selected.size());

    std::vector<double> losses(selected.size());
    std::vector<std::int64_t> uplink(selected.size());
    std::vector<std::int64_t> samples(selected.size());
    parallel_for(selected.size(), config.workers, [&](std::size_t i) {
      ClientState& client = state.clients[selected[i]];
      client.model = state.global;
      const LocalUpdateResult r =
          client_local_update(client.model, client.optimizer, client.shard->train,
                              config.local_epochs, config, client.shuffle_rng);
      losses[i] = r.epoch_losses.empty() ? 0.0 : r.epoch_losses.back();
      samples[i] = r.samples;
      uplink[i] = blob_payload(nn::to_blob(client.model, config.bytes_per_param));
    });

    std::vector<nn::PredictorParams> returned;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      const ClientState& client = state.clients[selected[i]];
      returned.push_back(client.model);
      log.client_losses.emplace_back(client.deployment_id, losses[i]);
      log.bytes_uplink += uplink[i];
      ledger.add_macs(samples[i] * state.global.mac_count(client.shard->train.lookback()));
    }
    state.global = fedavg_aggregate(returned);
    log.ms = timer.elapsed_ms();
  }
  ledger.add_round_bytes(log.bytes());
  ++state.round;
  return log;
}

// ---------------------------------------------------------------------------
// KD-gen

KdState make_kd_state(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                      const TrainConfig& config) {
  require_trainable(shards);
  KdState state;
  state.dims = dims;
  const nn::PredictorParams theta0 = initial_model(dims, config.seed);
  state.global_head = theta0.head;
  state.generator = initial_generator(dims, config.seed);
  state.clients = make_clients(shards, theta0, config.seed);
  state.server_rng = make_rng(config.seed, "server-select");
  state.generator_rng = make_rng(config.seed, "server-generator");
  return state;
}

RoundLog kdgen_round(KdState& state, const TrainConfig& config, metrics::CostLedger& ledger) {
  RoundLog log;
  log.strategy = Strategy::kKdgen;
  log.round = state.round;
  {
    metrics::ScopedTimer timer(ledger, "round " + std::to_string(state.round));
    const auto selected =
        select_clients(state.clients.size(), config.clients_per_round, state.server_rng);

    const std::int64_t head_down =
        blob_payload(nn::serialize_blocks(nn::head_blocks(std::as_const(state.global_head)), config.bytes_per_param));
    const std::int64_t gen_down = blob_payload(nn::to_blob(state.generator, config.bytes_per_param));
    log.bytes_downlink = (head_down + gen_down) * static_cast<std::int64_t>(selected.size());

    std::vector<double> losses(selected.size());
    std::vector<std::int64_t> uplink(selected.size());
    std::vector<std::int64_t> samples(selected.size());
    parallel_for(selected.size(), config.workers, [&](std::size_t i) {
      ClientState& client = state.clients[selected[i]];
      client.model.head = state.global_head;
      KdContext kd{&state.generator, state.dims, config.lambda_kd, &client.kd_rng};
      const LocalUpdateResult r =
          client_local_update(client.model, client.optimizer, client.shard->train,
                              config.local_epochs, config, client.shuffle_rng, &kd);
      if (!client.distribution) {
        client.distribution = kdgen::empirical_distribution(client.shard->train.y);
      }
      losses[i] = r.epoch_losses.empty() ? 0.0 : r.epoch_losses.back();
      samples[i] = r.samples;
      uplink[i] = blob_payload(
          nn::serialize_blocks(nn::head_blocks(std::as_const(client.model.head)), config.bytes_per_param));
    });

    std::vector<nn::LinearLayer> heads;
    std::vector<const nn::LinearLayer*> head_refs;
    std::vector<kdgen::LabelDistribution> dists;
    const std::int64_t sample_macs = state.clients.front().model.mac_count(state.dims.lookback) +
                                     state.generator.mac_count() +
                                     state.global_head.mac_count();
    for (std::size_t i = 0; i < selected.size(); ++i) {
      const ClientState& client = state.clients[selected[i]];
      heads.push_back(client.model.head);
      head_refs.push_back(&client.model.head);
      dists.push_back(*client.distribution);
      log.client_losses.emplace_back(client.deployment_id, losses[i]);
      log.bytes_uplink += uplink[i];
      ledger.add_macs(samples[i] * sample_macs);
    }

    state.global_head = fedavg_heads(heads);
    state.mixture = kdgen::gmm_aggregate(dists);
    const kdgen::GeneratorUpdateOptions gen_options{config.batch, config.generator_learning_rate};
    log.generator_loss = kdgen::generator_update(state.generator, state.generator_optimizer,
                                                 head_refs, state.mixture, state.dims,
                                                 gen_options, state.generator_rng);
    ledger.add_macs(static_cast<std::int64_t>(config.batch) *
                    (state.generator.mac_count() +
                     static_cast<std::int64_t>(heads.size()) * state.global_head.mac_count()));
    log.mixture = state.mixture;
    log.ms = timer.elapsed_ms();
  }
  ledger.add_round_bytes(log.bytes());
  ++state.round;
  return log;
}

// ---------------------------------------------------------------------------
// Whole-run drivers

StrategyResult train_icl(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                         const TrainConfig& config) {
  require_trainable(shards);
  StrategyResult result;
  result.strategy = Strategy::kIcl;
  result.ledger = metrics::CostLedger(Strategy::kIcl, config.fixed_clock);
  std::vector<ClientState> clients = make_clients(shards, initial_model(dims, config.seed), config.seed);
  const std::int64_t sample_macs = clients.front().model.mac_count(dims.lookback);

  {
    metrics::ScopedTimer total(result.ledger, "train");
    for (std::size_t epoch = 0; epoch < config.global_epochs; ++epoch) {
      RoundLog log;
      log.strategy = Strategy::kIcl;
      log.round = static_cast<std::int64_t>(epoch);
      metrics::ScopedTimer timer(result.ledger, "epoch " + std::to_string(epoch));
      std::vector<LocalUpdateResult> updates(clients.size());
      parallel_for(clients.size(), config.workers, [&](std::size_t i) {
        updates[i] = client_local_update(clients[i].model, clients[i].optimizer,
                                         clients[i].shard->train, 1, config,
                                         clients[i].shuffle_rng);
      });
      for (std::size_t i = 0; i < clients.size(); ++i) {
        log.client_losses.emplace_back(clients[i].deployment_id, updates[i].epoch_losses.back());
        result.ledger.add_macs(updates[i].samples * sample_macs);
      }
      log.ms = timer.elapsed_ms();
      result.rounds.push_back(std::move(log));
    }
  }
  for (auto& c : clients) result.models.push_back(std::move(c.model));
  result.formula_bytes = 0;
  return result;
}

StrategyResult train_dscl(std::span<const data::DeploymentShard> shards,
                          std::span<const nn::Tensor> raw_features, const nn::ModelDims& dims,
                          const TrainConfig& config) {
  require_trainable(shards);
  StrategyResult result;
  result.strategy = Strategy::kDscl;
  result.shared_model = true;
  result.ledger = metrics::CostLedger(Strategy::kDscl, config.fixed_clock);

  nn::PredictorParams model = initial_model(dims, config.seed);
  nn::AdamState optimizer;
  Rng shuffle = make_rng(config.seed, "client-shuffle", 0);

  std::vector<data::WindowedDataset> parts;
  for (const auto& s : shards) parts.push_back(s.train);
  const data::WindowedDataset pooled = data::concat(parts);

  // Every AP uploads its series and receives the trained model once.
  metrics::CommSizes sizes;
  sizes.num_clients = static_cast<std::int64_t>(raw_features.size());
  sizes.model_bytes = nn::param_bytes(model, config.bytes_per_param);
  std::int64_t uplink = 0;
  for (const auto& features : raw_features) {
    nn::ConstParamBlocks block{{"series", &features}};
    uplink += blob_payload(nn::serialize_blocks(block, config.bytes_per_param));
    sizes.dataset_bytes += static_cast<std::int64_t>(features.size()) * config.bytes_per_param;
  }

  {
    metrics::ScopedTimer total(result.ledger, "train");
    for (std::size_t epoch = 0; epoch < config.global_epochs; ++epoch) {
      metrics::ScopedTimer timer(result.ledger, "epoch " + std::to_string(epoch));
      const LocalUpdateResult r =
          client_local_update(model, optimizer, pooled, 1, config, shuffle);
      result.ledger.add_macs(r.samples * model.mac_count(dims.lookback));
      RoundLog log;
      log.strategy = Strategy::kDscl;
      log.round = static_cast<std::int64_t>(epoch);
      log.client_losses.emplace_back(-1, r.epoch_losses.back());
      log.ms = timer.elapsed_ms();
      result.rounds.push_back(std::move(log));
    }
  }

  const std::int64_t model_payload = blob_payload(nn::to_blob(model, config.bytes_per_param));
  const std::int64_t downlink = model_payload * sizes.num_clients;
  result.ledger.add_round_bytes(uplink + downlink);
  if (!result.rounds.empty()) {
    result.rounds.front().bytes_uplink = uplink;
    result.rounds.front().bytes_downlink = downlink;
  }
  result.formula_bytes = metrics::comm_cost_bytes(Strategy::kDscl, sizes, 0);
  result.models.assign(shards.size(), model);
  return result;
}

StrategyResult train_fl(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                        const TrainConfig& config) {
  StrategyResult result;
  result.strategy = Strategy::kFl;
  result.shared_model = true;
  result.ledger = metrics::CostLedger(Strategy::kFl, config.fixed_clock);
  FlState state = make_fl_state(shards, dims, config);
  for (std::size_t t = 0; t < config.rounds; ++t) {
    result.rounds.push_back(fl_round(state, config, result.ledger));
  }
  metrics::CommSizes sizes;
  sizes.model_bytes = nn::param_bytes(state.global, config.bytes_per_param);
  result.formula_bytes = metrics::comm_cost_bytes(
      Strategy::kFl, sizes, static_cast<std::int64_t>(config.rounds),
      static_cast<std::int64_t>(config.clients_per_round));
  result.models.assign(shards.size(), state.global);
  return result;
}

StrategyResult train_kdgen(std::span<const data::DeploymentShard> shards,
                           const nn::ModelDims& dims, const TrainConfig& config) {
  StrategyResult result;
  result.strategy = Strategy::kKdgen;
  result.ledger = metrics::CostLedger(Strategy::kKdgen, config.fixed_clock);
  KdState state = make_kd_state(shards, dims, config);
  for (std::size_t t = 0; t < config.rounds; ++t) {
    result.rounds.push_back(kdgen_round(state, config, result.ledger));
  }
  metrics::CommSizes sizes;
  sizes.head_bytes = nn::param_bytes(state.global_head, config.bytes_per_param);
  sizes.generator_bytes = nn::param_bytes(state.generator, config.bytes_per_param);
  result.formula_bytes = metrics::comm_cost_bytes(
      Strategy::kKdgen, sizes, static_cast<std::int64_t>(config.rounds),
      static_cast<std::int64_t>(config.clients_per_round));
  // Each deployment keeps its private extractor under the shared global head.
  for (auto& c : state.clients) {
    c.model.head = state.global_head;
    result.models.push_back(std::move(c.model));
  }
  result.generator = std::move(state.generator);
  return result;
}

}  // namespace fedload::strategies
