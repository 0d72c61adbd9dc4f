// fedload: run | cost | validate | gen-data
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fedload/common/error.hpp"
#include "fedload/data/partition.hpp"
#include "fedload/data/series.hpp"
#include "fedload/data/shards.hpp"
#include "fedload/experiment/config.hpp"
#include "fedload/experiment/runner.hpp"

namespace fs = std::filesystem;
using fedload::experiment::ExperimentConfig;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct RunFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> strategy;
  bool synthetic = false;
  std::optional<std::string> csv;
  std::optional<std::size_t> aps;
  std::optional<std::size_t> deployments;
  std::optional<std::size_t> days;
  std::optional<int> rounds;
  std::optional<int> epochs;
  std::optional<int> local_epochs;
  std::optional<int> global_epochs;
  std::optional<int> clients_per_round;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool fixed_clock = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "base preset: toy | paper");
  cmd->add_option("--strategy", f.strategy, "all | icl,dscl,fl,kdgen");
  cmd->add_flag("--synthetic", f.synthetic, "use synthetic diurnal data");
  cmd->add_option("--csv", f.csv, "CSV with timestamp,ap_id,load_bytes,num_users");
  cmd->add_option("--aps", f.aps, "K, number of APs");
  cmd->add_option("--deployments", f.deployments, "U, number of deployments");
  cmd->add_option("--days", f.days, "length of synthetic series");
  cmd->add_option("--rounds", f.rounds, "T, federated rounds");
  cmd->add_option("--epochs", f.epochs, "sets both local and global epochs");
  cmd->add_option("--local-epochs", f.local_epochs, "E_l");
  cmd->add_option("--global-epochs", f.global_epochs, "E_g");
  cmd->add_option("--clients-per-round", f.clients_per_round, "S");
  cmd->add_option("--workers", f.workers, "client threads; 1 is the reproducible mode");
  cmd->add_option("--seed", f.seed, "master seed (overrides FEDLOAD_SEED)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--fixed-clock", f.fixed_clock, "record 0 ms for every timer");
}

// preset < config file < FEDLOAD_SEED < flags
ExperimentConfig resolve_config(const RunFlags& f) {
  ExperimentConfig config;
  if (f.preset) {
    if (*f.preset == "paper") {
      config = ExperimentConfig::paper();
    } else if (*f.preset != "toy") {
      throw fedload::ConfigError("preset: unknown value '" + *f.preset + "'");
    }
  }
  if (f.config_path) config = fedload::experiment::load_config(*f.config_path, config);
  if (const char* env = std::getenv("FEDLOAD_SEED")) {
    try {
      config.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw fedload::ConfigError(std::string("FEDLOAD_SEED: not an integer '") + env + "'");
    }
  }
  if (f.strategy) config.strategies = fedload::experiment::parse_strategy_list(*f.strategy);
  if (f.csv) config.csv = fs::path(*f.csv);
  if (f.synthetic) config.csv.reset();
  if (f.aps) {
    config.num_aps = *f.aps;
    if (!config.csv) config.synthetic_aps = *f.aps;
  }
  if (f.deployments) config.num_deployments = *f.deployments;
  if (f.days) config.synthetic_days = *f.days;
  if (f.rounds) config.train.rounds = *f.rounds;
  if (f.epochs) config.train.local_epochs = config.train.global_epochs = *f.epochs;
  if (f.local_epochs) config.train.local_epochs = *f.local_epochs;
  if (f.global_epochs) config.train.global_epochs = *f.global_epochs;
  if (f.clients_per_round) config.train.clients_per_round = *f.clients_per_round;
  if (f.workers) config.train.workers = *f.workers;
  if (f.seed) config.seed = *f.seed;
  if (f.out) config.output_dir = *f.out;
  if (f.fixed_clock) config.train.fixed_clock = true;
  return config;
}

int report_violations(const std::vector<std::string>& violations) {
  for (const auto& v : violations) std::cerr << "invalid config: " << v << '\n';
  return violations.empty() ? 0 : kExitConfig;
}

int cmd_run(const RunFlags& flags) {
  const ExperimentConfig config = resolve_config(flags);
  if (int rc = report_violations(fedload::experiment::validate(config)); rc != 0) return rc;
  const auto out = fedload::experiment::run_experiment(config);
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const auto& r = out.reports[i];
    const auto mae = r.mean_mae_mb();
    const auto base = r.mean_persistence_mb();
    std::cout << fedload::metrics::to_string(r.strategy) << ": mae_mb";
    for (std::size_t h = 0; h < r.horizons.size(); ++h) {
      std::cout << " s=" << r.horizons[h] << ":" << mae[h] << " (persist " << base[h] << ")";
    }
    std::cout << "  comm_bytes=" << out.costs[i].bytes_total << '\n';
  }
  std::cout << "wrote " << config.output_dir.string() << '\n';
  return 0;
}

struct CostFlags {
  std::optional<std::string> preset;
  double dataset_mb = 0, model_mb = 0, head_mb = 0, generator_mb = 0;
  std::int64_t clients = 0;
  std::optional<std::int64_t> rounds, per_round;
};

std::int64_t mb_to_bytes(double mb) {
  return static_cast<std::int64_t>(std::llround(mb * fedload::metrics::kBytesPerMegabyte));
}

int cmd_cost(const CostFlags& f) {
  fedload::metrics::CommSizes sizes;
  std::int64_t rounds = 0, per_round = 0;
  if (f.preset) {
    if (*f.preset != "paper") throw fedload::ConfigError("preset: unknown value '" + *f.preset + "'");
    const auto paper = ExperimentConfig::paper();
    sizes = fedload::metrics::CommSizes::paper();
    rounds = paper.train.rounds;
    per_round = paper.train.clients_per_round;
  } else {
    sizes = {mb_to_bytes(f.dataset_mb), f.clients, mb_to_bytes(f.model_mb), mb_to_bytes(f.head_mb),
             mb_to_bytes(f.generator_mb)};
  }
  if (f.rounds) rounds = *f.rounds;
  if (f.per_round) per_round = *f.per_round;
  fedload::experiment::print_cost_table(
      std::cout, fedload::experiment::cost_table(sizes, rounds, per_round));
  return 0;
}

struct GenFlags {
  std::string out;
  std::size_t aps = 8, days = 3;
  std::uint64_t seed = 42;
  std::optional<std::string> dump;
  std::size_t deployments = 2;
};

int cmd_gen_data(const GenFlags& f) {
  const auto series = fedload::data::synth_generate({f.seed, f.aps, f.days});
  fedload::data::write_csv(fs::path(f.out), series);
  std::cout << "wrote " << series.size() << " APs to " << f.out << '\n';
  if (f.dump) {
    ExperimentConfig config;
    config.seed = f.seed;
    config.num_aps = f.aps;
    config.num_deployments = f.deployments;
    const auto groups = fedload::data::dirichlet_partition(config.partition_options());
    const auto shards = fedload::data::build_shards(
        series, groups,
        {config.dims.lookback, config.dims.horizon, config.train_ratio,
         fedload::data::ScalerScope::kPerDeployment});
    fedload::data::write_dataset_dump(*f.dump, series, shards);
    std::cout << "wrote dataset dump to " << *f.dump << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wi-Fi AP load prediction: isolated, data-sharing, FedAvg and KD-gen training"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "train, evaluate and write reports");
  add_run_flags(run, run_flags);

  RunFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "list config violations");
  add_run_flags(validate, validate_flags);

  CostFlags cost_flags;
  auto* cost = app.add_subcommand("cost", "communication cost of each strategy");
  cost->add_option("--preset", cost_flags.preset, "paper");
  cost->add_option("--dataset-mb", cost_flags.dataset_mb, "sum of raw datasets, MB");
  cost->add_option("--clients", cost_flags.clients, "K");
  cost->add_option("--model-mb", cost_flags.model_mb, "|theta|, MB");
  cost->add_option("--head-mb", cost_flags.head_mb, "|g_r|, MB");
  cost->add_option("--generator-mb", cost_flags.generator_mb, "|omega|, MB");
  cost->add_option("--rounds", cost_flags.rounds, "T");
  cost->add_option("--per-round", cost_flags.per_round, "S");

  GenFlags gen_flags;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic CSV");
  gen->add_option("--out", gen_flags.out, "CSV path")->required();
  gen->add_option("--aps", gen_flags.aps);
  gen->add_option("--days", gen_flags.days);
  gen->add_option("--seed", gen_flags.seed);
  gen->add_option("--deployments", gen_flags.deployments, "used by --dump");
  gen->add_option("--dump", gen_flags.dump, "also write per-AP CSVs and manifest.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (validate->parsed()) {
      const int rc = report_violations(fedload::experiment::validate(resolve_config(validate_flags)));
      if (rc == 0) std::cout << "ok\n";
      return rc;
    }
    if (cost->parsed()) return cmd_cost(cost_flags);
    if (gen->parsed()) return cmd_gen_data(gen_flags);
  } catch (const fedload::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fedload::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
