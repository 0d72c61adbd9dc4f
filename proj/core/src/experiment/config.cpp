#include "fedload/experiment/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fedload/common/error.hpp"
#include "json.hpp"

namespace fedload::experiment {

using nlohmann::json;

ExperimentConfig ExperimentConfig::paper() {
  ExperimentConfig c;
  c.synthetic_aps = 100;
  c.synthetic_days = 49;
  c.num_aps = 100;
  c.num_deployments = 20;
  c.dims = nn::ModelDims::paper();
  c.train.rounds = 100;
  c.train.local_epochs = 50;
  c.train.global_epochs = 100;
  c.train.clients_per_round = 20;
  c.strategies.assign(metrics::kAllStrategies.begin(), metrics::kAllStrategies.end());
  return c;
}

data::PartitionOptions ExperimentConfig::partition_options() const {
  return {num_aps, num_deployments, dirichlet_alpha, min_aps_per_deployment,
          max_aps_per_deployment, seed};
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (c.num_deployments == 0) v.push_back("partition.deployments: must be >= 1");
  if (c.min_aps_per_deployment > c.max_aps_per_deployment) {
    v.push_back("partition.min_size/max_size: min_size exceeds max_size");
  } else if (c.num_deployments * c.min_aps_per_deployment > c.num_aps ||
             c.num_deployments * c.max_aps_per_deployment < c.num_aps) {
    v.push_back("partition: cannot place " + std::to_string(c.num_aps) + " APs into " +
                std::to_string(c.num_deployments) + " deployments of " +
                std::to_string(c.min_aps_per_deployment) + "-" +
                std::to_string(c.max_aps_per_deployment) + " APs (need U*min <= K <= U*max)");
  }
  if (!(c.dirichlet_alpha > 0.0)) v.push_back("partition.alpha: must be > 0");
  if (c.csv) {
    if (!std::filesystem::exists(*c.csv)) v.push_back("data.csv: file not found: " + c.csv->string());
  } else {
    if (c.synthetic_days < 1) v.push_back("data.synthetic.days: must be >= 1");
    if (c.synthetic_aps < c.num_aps) {
      v.push_back("data.synthetic.aps: " + std::to_string(c.synthetic_aps) +
                  " generated APs cannot supply K = " + std::to_string(c.num_aps));
    }
  }
  const auto& d = c.dims;
  if (d.input_dim != data::kFeatureCount) v.push_back("model.input_dim: must be 4");
  if (d.lookback < 1 || d.horizon < 1 || d.hidden < 1 || d.latent < 1 || d.noise < 1 ||
      d.gen_hidden < 1) {
    v.push_back("model: every dimension must be >= 1");
  }
  for (std::size_t s : c.horizons) {
    if (s < 1 || s > d.horizon) {
      v.push_back("horizons: " + std::to_string(s) + " outside [1, model.horizon]");
    }
  }
  const auto& t = c.train;
  if (!(t.learning_rate > 0.0)) v.push_back("train.lr: must be > 0");
  if (!(t.generator_learning_rate > 0.0)) v.push_back("train.gen_lr: must be > 0");
  if (t.lambda_kd < 0.0) v.push_back("train.lambda_kd: must be >= 0");
  if (t.batch < 1) v.push_back("train.batch: must be >= 1");
  if (t.clients_per_round < 1) v.push_back("train.clients_per_round: must be >= 1");
  if (t.clients_per_round > c.num_deployments) {
    v.push_back("train.clients_per_round: S = " + std::to_string(t.clients_per_round) +
                " exceeds the number of deployments U = " + std::to_string(c.num_deployments));
  }
  if (t.bytes_per_param != 4 && t.bytes_per_param != 8) {
    v.push_back("train.bytes_per_param: must be 4 or 8");
  }
  if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0)) v.push_back("train.train_ratio: must be in (0, 1)");
  if (c.strategies.empty()) v.push_back("strategy: at least one strategy required");
  return v;
}

std::vector<metrics::Strategy> parse_strategy_list(std::string_view text) {
  if (text == "all") return {metrics::kAllStrategies.begin(), metrics::kAllStrategies.end()};
  std::vector<metrics::Strategy> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view tag = text.substr(start, comma - start);
    if (!tag.empty()) {
      const auto s = metrics::parse_strategy(tag);
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("strategy: empty list");
  return out;
}

namespace {

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + "." + key + ": unknown key");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig c) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(j, "config", {"seed", "strategy", "output", "workers", "data", "partition", "model",
                           "train", "horizons"});
  read(j, "seed", c.seed, "config");
  read(j, "workers", c.train.workers, "config");
  read(j, "horizons", c.horizons, "config");
  if (j.contains("output")) c.output_dir = j.at("output").get<std::string>();
  if (j.contains("strategy")) {
    const json& s = j.at("strategy");
    if (s.is_string()) {
      c.strategies = parse_strategy_list(s.get<std::string>());
    } else if (s.is_array()) {
      c.strategies.clear();
      for (const auto& tag : s) c.strategies.push_back(metrics::parse_strategy(tag.get<std::string>()));
    } else {
      throw ConfigError("config.strategy: wrong type");
    }
  }
  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, "data", {"csv", "synthetic"});
    if (d.contains("csv") && !d.at("csv").is_null()) c.csv = d.at("csv").get<std::string>();
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      check_keys(s, "data.synthetic", {"aps", "days"});
      read(s, "aps", c.synthetic_aps, "data.synthetic");
      read(s, "days", c.synthetic_days, "data.synthetic");
    }
  }
  if (j.contains("partition")) {
    const json& p = j.at("partition");
    check_keys(p, "partition", {"aps", "deployments", "alpha", "min_size", "max_size"});
    read(p, "aps", c.num_aps, "partition");
    read(p, "deployments", c.num_deployments, "partition");
    read(p, "alpha", c.dirichlet_alpha, "partition");
    read(p, "min_size", c.min_aps_per_deployment, "partition");
    read(p, "max_size", c.max_aps_per_deployment, "partition");
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"input_dim", "lookback", "horizon", "hidden", "latent", "noise",
                            "gen_hidden"});
    read(m, "input_dim", c.dims.input_dim, "model");
    read(m, "lookback", c.dims.lookback, "model");
    read(m, "horizon", c.dims.horizon, "model");
    read(m, "hidden", c.dims.hidden, "model");
    read(m, "latent", c.dims.latent, "model");
    read(m, "noise", c.dims.noise, "model");
    read(m, "gen_hidden", c.dims.gen_hidden, "model");
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t, "train", {"rounds", "local_epochs", "global_epochs", "batch", "lr", "gen_lr",
                            "clients_per_round", "lambda_kd", "train_ratio", "bytes_per_param",
                            "fixed_clock"});
    read(t, "rounds", c.train.rounds, "train");
    read(t, "local_epochs", c.train.local_epochs, "train");
    read(t, "global_epochs", c.train.global_epochs, "train");
    read(t, "batch", c.train.batch, "train");
    read(t, "lr", c.train.learning_rate, "train");
    read(t, "gen_lr", c.train.generator_learning_rate, "train");
    read(t, "clients_per_round", c.train.clients_per_round, "train");
    read(t, "lambda_kd", c.train.lambda_kd, "train");
    read(t, "train_ratio", c.train_ratio, "train");
    read(t, "bytes_per_param", c.train.bytes_per_param, "train");
    read(t, "fixed_clock", c.train.fixed_clock, "train");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::string config_to_json(const ExperimentConfig& c) {
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(metrics::to_string(s)));
  json j = {
      {"seed", c.seed},
      {"strategy", strategies},
      {"workers", c.train.workers},
      {"horizons", c.horizons},
      {"data", {{"csv", c.csv ? json(c.csv->string()) : json(nullptr)},
                {"synthetic", {{"aps", c.synthetic_aps}, {"days", c.synthetic_days}}}}},
      {"partition", {{"aps", c.num_aps},
                     {"deployments", c.num_deployments},
                     {"alpha", c.dirichlet_alpha},
                     {"min_size", c.min_aps_per_deployment},
                     {"max_size", c.max_aps_per_deployment}}},
      {"model", {{"input_dim", c.dims.input_dim},
                 {"lookback", c.dims.lookback},
                 {"horizon", c.dims.horizon},
                 {"hidden", c.dims.hidden},
                 {"latent", c.dims.latent},
                 {"noise", c.dims.noise},
                 {"gen_hidden", c.dims.gen_hidden}}},
      {"train", {{"rounds", c.train.rounds},
                 {"local_epochs", c.train.local_epochs},
                 {"global_epochs", c.train.global_epochs},
                 {"batch", c.train.batch},
                 {"lr", c.train.learning_rate},
                 {"gen_lr", c.train.generator_learning_rate},
                 {"clients_per_round", c.train.clients_per_round},
                 {"lambda_kd", c.train.lambda_kd},
                 {"train_ratio", c.train_ratio},
                 {"bytes_per_param", c.train.bytes_per_param},
                 {"fixed_clock", c.train.fixed_clock}}}};
  return j.dump();
}

}  // namespace fedload::experiment
