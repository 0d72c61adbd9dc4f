#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fedload/common/error.hpp"
#include "fedload/experiment/config.hpp"
#include "fedload/experiment/runner.hpp"
#include "fedload/metrics/report.hpp"
#include "fedload/nn/serialize.hpp"
#include "testing.hpp"

using namespace fedload;
using experiment::ExperimentConfig;
using metrics::Strategy;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_run(const fs::path& out) {
  ExperimentConfig c;
  c.dims = fedload::testing::tiny_dims();
  c.horizons = {1, 4};
  c.synthetic_days = 1;
  c.train.rounds = 2;
  c.train.local_epochs = 1;
  c.train.global_epochs = 1;
  c.train.batch = 64;
  c.train.fixed_clock = true;
  c.strategies = {metrics::kAllStrategies.begin(), metrics::kAllStrategies.end()};
  c.output_dir = out;
  return c;
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("default config is valid at toy scale") {
  const auto c = ExperimentConfig::toy();
  CHECK(experiment::validate(c).empty());
  CHECK(c.num_aps == 8);
  CHECK(c.num_deployments == 2);
  CHECK(c.train.rounds == 5);
  CHECK(c.train.local_epochs == 2);
  CHECK_FALSE(c.csv.has_value());
  CHECK(experiment::validate(ExperimentConfig::paper()).empty());
}

TEST_CASE("paper preset values") {
  const auto p = ExperimentConfig::paper();
  CHECK(p.num_aps == 100);
  CHECK(p.num_deployments == 20);
  CHECK(p.train.clients_per_round == 20);
  CHECK(p.train.rounds == 100);
  CHECK(p.train.local_epochs == 50);
  CHECK(p.train.global_epochs == 100);
  CHECK(p.dims == nn::ModelDims::paper());
}

TEST_CASE("validation findings") {
  auto c = ExperimentConfig::toy();
  c.num_deployments = 3;  // 3 * 4 > 8
  c.train.clients_per_round = 1;
  auto v = experiment::validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("U*min <= K <= U*max") != std::string::npos);

  c = ExperimentConfig::toy();
  c.train.learning_rate = -0.1;
  v = experiment::validate(c);
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "train.lr"));

  c = ExperimentConfig::toy();
  c.csv = "/nonexistent/file.csv";
  c.train.generator_learning_rate = 0.0;
  v = experiment::validate(c);
  CHECK(v.size() == 2);
  CHECK(mentions(v, "data.csv"));
  CHECK(mentions(v, "train.gen_lr"));

  c = ExperimentConfig::toy();
  c.horizons = {1, 31};
  CHECK(mentions(experiment::validate(c), "horizons"));
}

TEST_CASE("config file parsing") {
  const auto c = experiment::parse_config(R"({
    "seed": 7, "strategy": "fl,kdgen", "workers": 2,
    "data": {"synthetic": {"aps": 10, "days": 2}},
    "partition": {"aps": 10, "deployments": 2},
    "model": {"hidden": 8},
    "train": {"rounds": 3, "lr": 0.005, "fixed_clock": true},
    "horizons": [1, 2]
  })");
  CHECK(c.seed == 7);
  CHECK(c.strategies == std::vector<Strategy>{Strategy::kFl, Strategy::kKdgen});
  CHECK(c.train.workers == 2);
  CHECK(c.synthetic_aps == 10);
  CHECK(c.synthetic_days == 2);
  CHECK(c.num_aps == 10);
  CHECK(c.dims.hidden == 8);
  CHECK(c.dims.latent == nn::ModelDims::toy().latent);
  CHECK(c.train.rounds == 3);
  CHECK(c.train.learning_rate == 0.005);
  CHECK(c.train.fixed_clock);
  CHECK(c.horizons == std::vector<std::size_t>{1, 2});

  CHECK_THROWS_AS(experiment::parse_config(R"({"sede": 1})"), ConfigError);
  CHECK_THROWS_AS(experiment::parse_config(R"({"train": {"rounds": "five"}})"), ConfigError);
  CHECK_THROWS_AS(experiment::parse_config("{"), ConfigError);
  CHECK_THROWS_AS(experiment::parse_config(R"({"strategy": "sgd"})"), ConfigError);

  const auto again = experiment::parse_config(experiment::config_to_json(c));
  CHECK(experiment::config_to_json(again) == experiment::config_to_json(c));
  CHECK(experiment::parse_strategy_list("all").size() == 4);
}

TEST_CASE("load_data picks K of the available APs") {
  auto c = ExperimentConfig::toy();
  c.synthetic_aps = 12;
  c.synthetic_days = 1;
  const auto a = experiment::load_data(c);
  const auto b = experiment::load_data(c);
  CHECK(a.series.size() == 8);
  CHECK(a.series == b.series);
  CHECK(a.groups == b.groups);
  for (std::size_t i = 1; i < a.series.size(); ++i) CHECK(a.series[i - 1].ap_id < a.series[i].ap_id);

  c.csv = fs::temp_directory_path() / "fedload_three_aps.csv";
  data::write_csv(*c.csv, data::synth_generate({1, 3, 1}));
  CHECK_THROWS_AS(experiment::load_data(c), DataError);
  fs::remove(*c.csv);
}

TEST_CASE("run writes re-parseable artifacts for every strategy") {
  const fs::path out = fs::temp_directory_path() / "fedload_test_run";
  fs::remove_all(out);
  const auto c = tiny_run(out);
  const auto result = experiment::run_experiment(c);
  CHECK(result.reports.size() == 4);

  const auto reports = metrics::reports_from_json(slurp(out / "report.json"));
  REQUIRE(reports.size() == 4);
  CHECK(reports == result.reports);
  for (const auto& r : reports) {
    CHECK(r.horizons == c.horizons);
    CHECK(r.deployments.size() == 2);
  }
  const auto costs = metrics::costs_from_json(slurp(out / "cost.json"));
  REQUIRE(costs.size() == 4);
  for (const auto& s : costs) CHECK(s.bytes_match);

  std::ifstream rounds(out / "rounds.ndjson");
  std::string line;
  std::size_t n = 0;
  while (std::getline(rounds, line)) {
    strategies::parse_round_log(line);
    ++n;
  }
  CHECK(n == 1 + 1 + 2 + 2);  // icl and dscl log per epoch, fl and kdgen per round

  const std::string table = slurp(out / "mae_table.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 4 * 2);

  for (const char* name : {"icl_dep0.bin", "icl_dep1.bin", "dscl_global.bin", "fl_global.bin",
                           "kdgen_dep0.bin", "kdgen_dep1.bin", "kdgen_generator.bin"}) {
    const fs::path blob = out / "models" / name;
    REQUIRE(fs::exists(blob));
    const auto bytes = nn::read_blob_file(blob);
    CHECK(nn::inspect_blob(bytes).bytes_per_param == c.train.bytes_per_param);
  }
  auto model = nn::PredictorParams::zeros(c.dims);
  nn::from_blob(model, nn::read_blob_file(out / "models" / "fl_global.bin"));
  fs::remove_all(out);
}

TEST_CASE("run rejects an invalid config") {
  auto c = tiny_run(fs::temp_directory_path() / "fedload_never_written");
  c.train.learning_rate = 0.0;
  CHECK_THROWS_AS(experiment::run_experiment(c, false), ConfigError);
}

TEST_CASE("cost table order and values") {
  const auto rows = experiment::cost_table(metrics::CommSizes::paper(), 100, 20);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].megabytes == 0.0);
  CHECK(rows[1].megabytes == 1120.0);
  CHECK(rows[2].megabytes == 14800.0);
  CHECK(rows[3].megabytes == 234.0);
  std::ostringstream out;
  experiment::print_cost_table(out, rows);
  CHECK(out.str().find("kdgen") != std::string::npos);
}
