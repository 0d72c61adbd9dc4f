#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedload/data/partition.hpp"
#include "fedload/data/series.hpp"
#include "fedload/metrics/metrics.hpp"
#include "fedload/nn/models.hpp"
#include "fedload/strategies/config.hpp"

namespace fedload::experiment {

/// Everything one `run` needs. Defaults are a toy-scale synthetic setup
/// (8 APs in 2 deployments, 5 rounds, 2 epochs) that finishes in minutes.
struct ExperimentConfig {
  std::uint64_t seed = 42;

  // Data source: CSV when set, otherwise synthetic.
  std::optional<std::filesystem::path> csv;
  std::size_t synthetic_aps = 8;
  std::size_t synthetic_days = 3;

  std::size_t num_aps = 8;          // K
  std::size_t num_deployments = 2;  // U
  double dirichlet_alpha = 1.0;
  std::size_t min_aps_per_deployment = 4;
  std::size_t max_aps_per_deployment = 6;

  nn::ModelDims dims = nn::ModelDims::toy();
  strategies::TrainConfig train;
  double train_ratio = 0.8;
  std::vector<std::size_t> horizons = {1, 5, 15, 30};

  std::vector<metrics::Strategy> strategies = {metrics::Strategy::kFl};
  std::filesystem::path output_dir = "fedload_out";

  static ExperimentConfig toy() { return {}; }
  // Table-scale setup: 100 APs over 20 deployments, H = 480, 100 rounds.
  static ExperimentConfig paper();

  data::PartitionOptions partition_options() const;
};

// Field-level problems; empty when the config is usable.
std::vector<std::string> validate(const ExperimentConfig& config);

// Config file (JSON). Keys, all optional:
//   seed, strategy ("all" | "icl,fl,..." | array), output, workers,
//   data:      { csv, synthetic: { aps, days } }
//   partition: { aps, deployments, alpha, min_size, max_size }
//   model:     { input_dim, lookback, horizon, hidden, latent, noise, gen_hidden }
//   train:     { rounds, local_epochs, global_epochs, batch, lr, gen_lr,
//                clients_per_round, lambda_kd, train_ratio, bytes_per_param,
//                fixed_clock }
//   horizons:  [1, 5, 15, 30]
// Unknown keys and type mismatches raise ConfigError.
ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);

std::vector<metrics::Strategy> parse_strategy_list(std::string_view text);

}  // namespace fedload::experiment
