#include "fedload/experiment/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fedload/common/error.hpp"
#include "fedload/data/partition.hpp"
#include "fedload/data/shards.hpp"
#include "fedload/nn/serialize.hpp"
#include "fedload/strategies/evaluate.hpp"

namespace fedload::experiment {

using metrics::Strategy;

LoadedData load_data(const ExperimentConfig& config) {
  std::vector<data::ApSeries> all;
  if (config.csv) {
    all = data::ingest_csv(*config.csv);
  } else {
    all = data::synth_generate({config.seed, config.synthetic_aps, config.synthetic_days});
  }
  if (all.size() < config.num_aps) {
    throw DataError("dataset has " + std::to_string(all.size()) + " APs, K = " +
                    std::to_string(config.num_aps) + " required");
  }
  std::vector<std::size_t> pick(all.size());
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  if (all.size() > config.num_aps) {
    Rng rng = make_rng(config.seed, "ap-select");
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(config.num_aps);
    std::sort(pick.begin(), pick.end());
  }
  LoadedData out;
  for (std::size_t i : pick) out.series.push_back(std::move(all[i]));
  out.groups = data::dirichlet_partition(config.partition_options());
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

metrics::EvalReport evaluate_result(const strategies::StrategyResult& result,
                                    const std::vector<data::DeploymentShard>& shards,
                                    const ExperimentConfig& config) {
  metrics::EvalReport report;
  report.strategy = result.strategy;
  report.seed = config.seed;
  report.horizons = config.horizons;
  report.config_json = config_to_json(config);
  for (std::size_t i = 0; i < shards.size(); ++i) {
    report.deployments.push_back(strategies::evaluate(result.models[i], shards[i], config.horizons));
  }
  return report;
}

void write_models(const std::filesystem::path& dir, const strategies::StrategyResult& result,
                  const std::vector<data::DeploymentShard>& shards, int bytes_per_param) {
  const std::string tag(metrics::to_string(result.strategy));
  if (result.shared_model) {
    nn::write_blob_file(dir / (tag + "_global.bin"),
                        nn::to_blob(result.models.front(), bytes_per_param));
  } else {
    for (std::size_t i = 0; i < shards.size(); ++i) {
      nn::write_blob_file(dir / (tag + "_dep" + std::to_string(shards[i].deployment_id) + ".bin"),
                          nn::to_blob(result.models[i], bytes_per_param));
    }
  }
  if (result.generator) {
    nn::write_blob_file(dir / (tag + "_generator.bin"),
                        nn::to_blob(*result.generator, bytes_per_param));
  }
}

}  // namespace

RunOutputs run_experiment(const ExperimentConfig& config, bool write_files) {
  const auto violations = validate(config);
  if (!violations.empty()) throw ConfigError(violations.front());

  const LoadedData loaded = load_data(config);
  data::ShardOptions options{config.dims.lookback, config.dims.horizon, config.train_ratio,
                             data::ScalerScope::kPerDeployment};
  const auto local_shards = data::build_shards(loaded.series, loaded.groups, options);
  std::vector<data::DeploymentShard> global_shards;
  const bool need_dscl = std::find(config.strategies.begin(), config.strategies.end(),
                                   Strategy::kDscl) != config.strategies.end();
  if (need_dscl) {
    options.scope = data::ScalerScope::kGlobal;
    global_shards = data::build_shards(loaded.series, loaded.groups, options);
  }

  if (write_files) std::filesystem::create_directories(config.output_dir / "models");

  RunOutputs out;
  for (Strategy s : config.strategies) {
    strategies::StrategyResult result;
    const std::vector<data::DeploymentShard>* shards = &local_shards;
    switch (s) {
      case Strategy::kIcl:
        result = strategies::train_icl(local_shards, config.dims, config.train);
        break;
      case Strategy::kDscl: {
        std::vector<nn::Tensor> raw;
        for (const auto& group : loaded.groups) {
          for (std::size_t idx : group) raw.push_back(loaded.series[idx].features);
        }
        result = strategies::train_dscl(global_shards, raw, config.dims, config.train);
        shards = &global_shards;
        break;
      }
      case Strategy::kFl:
        result = strategies::train_fl(local_shards, config.dims, config.train);
        break;
      case Strategy::kKdgen:
        result = strategies::train_kdgen(local_shards, config.dims, config.train);
        break;
    }
    out.reports.push_back(evaluate_result(result, *shards, config));
    out.costs.push_back(metrics::summarize(result.ledger, result.formula_bytes));
    out.rounds.insert(out.rounds.end(), result.rounds.begin(), result.rounds.end());
    if (write_files) {
      write_models(config.output_dir / "models", result, *shards, config.train.bytes_per_param);
    }
  }

  if (write_files) {
    write_text(config.output_dir / "report.json", metrics::reports_to_json(out.reports));
    write_text(config.output_dir / "cost.json", metrics::costs_to_json(out.costs));
    std::string lines;
    for (const auto& r : out.rounds) lines += strategies::to_ndjson(r) + "\n";
    write_text(config.output_dir / "rounds.ndjson", lines);
    std::ofstream table(config.output_dir / "mae_table.csv", std::ios::trunc);
    metrics::write_mae_table(table, out.reports);
  }
  return out;
}

std::vector<CostRow> cost_table(const metrics::CommSizes& sizes, std::int64_t rounds,
                                std::int64_t clients_per_round) {
  std::vector<CostRow> rows;
  for (Strategy s : metrics::kAllStrategies) {
    const std::int64_t bytes = metrics::comm_cost_bytes(s, sizes, rounds, clients_per_round);
    rows.push_back({s, bytes, static_cast<double>(bytes) / metrics::kBytesPerMegabyte});
  }
  return rows;
}

void print_cost_table(std::ostream& out, const std::vector<CostRow>& rows) {
  out << std::left << std::setw(10) << "strategy" << std::setw(16) << "C_MB" << "bytes\n";
  for (const auto& r : rows) {
    std::ostringstream mb;
    mb << std::setprecision(15) << r.megabytes;
    out << std::setw(10) << metrics::to_string(r.strategy) << std::setw(16) << mb.str()
        << r.bytes << '\n';
  }
}

}  // namespace fedload::experiment
