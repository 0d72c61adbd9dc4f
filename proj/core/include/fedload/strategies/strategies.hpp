#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedload/common/random.hpp"
#include "fedload/data/shards.hpp"
#include "fedload/kdgen/mixture.hpp"
#include "fedload/metrics/ledger.hpp"
#include "fedload/nn/adam.hpp"
#include "fedload/nn/models.hpp"
#include "fedload/strategies/config.hpp"

namespace fedload::strategies {

/// One line of rounds.ndjson. ICL and DSCL log one record per epoch.
struct RoundLog {
  metrics::Strategy strategy = metrics::Strategy::kFl;
  std::int64_t round = 0;
  std::vector<std::pair<int, double>> client_losses;  // (deployment_id, last-epoch loss)
  std::int64_t bytes_uplink = 0;
  std::int64_t bytes_downlink = 0;
  double ms = 0.0;
  std::optional<kdgen::GlobalMixture> mixture;  // KD-gen only
  std::optional<double> generator_loss;         // KD-gen only

  std::int64_t bytes() const { return bytes_uplink + bytes_downlink; }
};

std::string to_ndjson(const RoundLog& log);
RoundLog parse_round_log(std::string_view line);

/// Per-deployment participant. Optimizer state and random streams persist
/// across rounds.
struct ClientState {
  int deployment_id = 0;
  const data::DeploymentShard* shard = nullptr;
  nn::PredictorParams model;
  nn::AdamState optimizer;
  Rng shuffle_rng;
  Rng kd_rng;
  std::optional<kdgen::LabelDistribution> distribution;
};

nn::PredictorParams initial_model(const nn::ModelDims& dims, std::uint64_t seed);
nn::GeneratorParams initial_generator(const nn::ModelDims& dims, std::uint64_t seed);
std::vector<ClientState> make_clients(std::span<const data::DeploymentShard> shards,
                                      const nn::PredictorParams& initial, std::uint64_t seed);

struct FlState {
  nn::PredictorParams global;
  std::int64_t round = 0;
  std::vector<ClientState> clients;
  Rng server_rng;
};

FlState make_fl_state(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                      const TrainConfig& config);

// Samples S clients, pushes theta_t, runs E_l local epochs on each, pulls the
// full models back and replaces theta with their unweighted mean.
RoundLog fl_round(FlState& state, const TrainConfig& config, metrics::CostLedger& ledger);

struct KdState {
  nn::ModelDims dims;
  nn::LinearLayer global_head;
  nn::GeneratorParams generator;
  nn::AdamState generator_optimizer;
  kdgen::GlobalMixture mixture;
  std::int64_t round = 0;
  std::vector<ClientState> clients;
  Rng server_rng;
  Rng generator_rng;
};

KdState make_kd_state(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                      const TrainConfig& config);

// Pushes the global head and the generator, trains each sampled client on l'
// with its private extractor, pulls heads and label distributions, averages
// the heads, rebuilds the mixture and takes one generator step.
RoundLog kdgen_round(KdState& state, const TrainConfig& config, metrics::CostLedger& ledger);

struct StrategyResult {
  metrics::Strategy strategy = metrics::Strategy::kIcl;
  // models[i] serves shards[i]. For DSCL and FL all entries are the global model.
  std::vector<nn::PredictorParams> models;
  bool shared_model = false;
  std::optional<nn::GeneratorParams> generator;
  metrics::CostLedger ledger;
  std::vector<RoundLog> rounds;
  std::int64_t formula_bytes = 0;  // closed-form communication cost at the same bytes_per_param
};

StrategyResult train_icl(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                         const TrainConfig& config);
// `raw_features` are the unscaled full series of every AP across the shards;
// they are what DSCL ships to the central trainer.
StrategyResult train_dscl(std::span<const data::DeploymentShard> shards,
                          std::span<const nn::Tensor> raw_features, const nn::ModelDims& dims,
                          const TrainConfig& config);
StrategyResult train_fl(std::span<const data::DeploymentShard> shards, const nn::ModelDims& dims,
                        const TrainConfig& config);
StrategyResult train_kdgen(std::span<const data::DeploymentShard> shards,
                           const nn::ModelDims& dims, const TrainConfig& config);

}  // namespace fedload::strategies
