#include "fedload/metrics/report.hpp"

#include <ostream>

#include "fedload/common/error.hpp"
#include "json.hpp"

namespace fedload::metrics {

using nlohmann::json;

namespace {

std::vector<double> mean_over(const std::vector<DeploymentEval>& deps,
                              std::vector<double> DeploymentEval::*field, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (deps.empty()) return out;
  for (const auto& d : deps) {
    for (std::size_t i = 0; i < n; ++i) out[i] += (d.*field)[i];
  }
  for (double& v : out) v /= static_cast<double>(deps.size());
  return out;
}

}  // namespace

std::vector<double> EvalReport::mean_mae_mb() const {
  return mean_over(deployments, &DeploymentEval::mae_mb, horizons.size());
}

std::vector<double> EvalReport::mean_mae_scaled() const {
  return mean_over(deployments, &DeploymentEval::mae_scaled, horizons.size());
}

std::vector<double> EvalReport::mean_persistence_mb() const {
  return mean_over(deployments, &DeploymentEval::persistence_mb, horizons.size());
}

CostSummary summarize(const CostLedger& ledger, std::int64_t formula_bytes) {
  return {ledger.strategy(),
          ledger.bytes_total(),
          formula_bytes,
          measured_bytes_check(ledger, formula_bytes),
          ledger.round_bytes(),
          ledger.wall_ms_total(),
          ledger.mac_total(),
          ledger.timings()};
}

std::string reports_to_json(const std::vector<EvalReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json deps = json::array();
    for (const auto& d : r.deployments) {
      deps.push_back({{"deployment_id", d.deployment_id},
                      {"mae_scaled", d.mae_scaled},
                      {"mae_mb", d.mae_mb},
                      {"persistence_scaled", d.persistence_scaled},
                      {"persistence_mb", d.persistence_mb}});
    }
    arr.push_back({{"strategy", std::string(to_string(r.strategy))},
                   {"seed", r.seed},
                   {"horizons", r.horizons},
                   {"config", json::parse(r.config_json)},
                   {"mean_mae_mb", r.mean_mae_mb()},
                   {"mean_mae_scaled", r.mean_mae_scaled()},
                   {"mean_persistence_mb", r.mean_persistence_mb()},
                   {"deployments", deps}});
  }
  return json{{"reports", arr}}.dump(2) + "\n";
}

std::vector<EvalReport> reports_from_json(std::string_view text) {
  std::vector<EvalReport> out;
  try {
    const json j = json::parse(text);
    for (const auto& r : j.at("reports")) {
      EvalReport rep;
      rep.strategy = parse_strategy(r.at("strategy").get<std::string>());
      rep.seed = r.at("seed").get<std::uint64_t>();
      rep.horizons = r.at("horizons").get<std::vector<std::size_t>>();
      rep.config_json = r.at("config").dump();
      for (const auto& d : r.at("deployments")) {
        rep.deployments.push_back({d.at("deployment_id").get<int>(),
                                   d.at("mae_scaled").get<std::vector<double>>(),
                                   d.at("mae_mb").get<std::vector<double>>(),
                                   d.at("persistence_scaled").get<std::vector<double>>(),
                                   d.at("persistence_mb").get<std::vector<double>>()});
      }
      out.push_back(std::move(rep));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("report.json: ") + e.what());
  }
  return out;
}

std::string costs_to_json(const std::vector<CostSummary>& costs) {
  json arr = json::array();
  for (const auto& c : costs) {
    json timings = json::array();
    for (const auto& t : c.timings) {
      timings.push_back({{"label", t.label}, {"ms", t.ms}, {"depth", t.depth}});
    }
    arr.push_back({{"strategy", std::string(to_string(c.strategy))},
                   {"bytes_total", c.bytes_total},
                   {"formula_bytes", c.formula_bytes},
                   {"bytes_match", c.bytes_match},
                   {"mb_total", static_cast<double>(c.bytes_total) / kBytesPerMegabyte},
                   {"round_bytes", c.round_bytes},
                   {"wall_ms_total", c.wall_ms_total},
                   {"mac_total", c.mac_total},
                   {"timings", timings}});
  }
  return json{{"megabyte_bytes", 1000000}, {"ledgers", arr}}.dump(2) + "\n";
}

std::vector<CostSummary> costs_from_json(std::string_view text) {
  std::vector<CostSummary> out;
  try {
    const json j = json::parse(text);
    for (const auto& c : j.at("ledgers")) {
      CostSummary s;
      s.strategy = parse_strategy(c.at("strategy").get<std::string>());
      s.bytes_total = c.at("bytes_total").get<std::int64_t>();
      s.formula_bytes = c.at("formula_bytes").get<std::int64_t>();
      s.bytes_match = c.at("bytes_match").get<bool>();
      s.round_bytes = c.at("round_bytes").get<std::vector<std::int64_t>>();
      s.wall_ms_total = c.at("wall_ms_total").get<double>();
      s.mac_total = c.at("mac_total").get<std::int64_t>();
      for (const auto& t : c.at("timings")) {
        s.timings.push_back({t.at("label").get<std::string>(), t.at("ms").get<double>(),
                             t.at("depth").get<int>()});
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("cost.json: ") + e.what());
  }
  return out;
}

void write_mae_table(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "strategy,horizon,mae_mb,mae_scaled,persistence_mb\n";
  out.precision(17);
  for (const auto& r : reports) {
    const auto mb = r.mean_mae_mb();
    const auto scaled = r.mean_mae_scaled();
    const auto persistence = r.mean_persistence_mb();
    for (std::size_t i = 0; i < r.horizons.size(); ++i) {
      out << to_string(r.strategy) << ',' << r.horizons[i] << ',' << mb[i] << ','
          << scaled[i] << ',' << persistence[i] << '\n';
    }
  }
}

}  // namespace fedload::metrics
