#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fedload/metrics/ledger.hpp"
#include "fedload/metrics/metrics.hpp"

namespace fedload::metrics {

struct DeploymentEval {
  int deployment_id = 0;
  // One entry per evaluated horizon.
  std::vector<double> mae_scaled;
  std::vector<double> mae_mb;
  std::vector<double> persistence_scaled;
  std::vector<double> persistence_mb;

  friend bool operator==(const DeploymentEval&, const DeploymentEval&) = default;
};

struct EvalReport {
  Strategy strategy = Strategy::kIcl;
  std::uint64_t seed = 0;
  std::vector<std::size_t> horizons;
  std::vector<DeploymentEval> deployments;
  std::string config_json = "{}";  // snapshot of the experiment config

  // Means over deployments, one per horizon.
  std::vector<double> mean_mae_mb() const;
  std::vector<double> mean_mae_scaled() const;
  std::vector<double> mean_persistence_mb() const;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct CostSummary {
  Strategy strategy = Strategy::kIcl;
  std::int64_t bytes_total = 0;
  std::int64_t formula_bytes = 0;
  bool bytes_match = false;
  std::vector<std::int64_t> round_bytes;
  double wall_ms_total = 0.0;
  std::int64_t mac_total = 0;
  std::vector<TimingRecord> timings;
};

CostSummary summarize(const CostLedger& ledger, std::int64_t formula_bytes);

// report.json schema:
//   { "reports": [ { "strategy", "seed", "horizons": [..], "config": {..},
//                    "mean_mae_mb": [..], "mean_mae_scaled": [..],
//                    "mean_persistence_mb": [..],
//                    "deployments": [ { "deployment_id", "mae_scaled": [..],
//                                       "mae_mb": [..], "persistence_scaled": [..],
//                                       "persistence_mb": [..] } ] } ] }
std::string reports_to_json(const std::vector<EvalReport>& reports);
std::vector<EvalReport> reports_from_json(std::string_view text);

// cost.json schema:
//   { "megabyte_bytes": 1000000,
//     "ledgers": [ { "strategy", "bytes_total", "formula_bytes", "bytes_match",
//                    "mb_total", "round_bytes": [..], "wall_ms_total", "mac_total",
//                    "timings": [ { "label", "ms", "depth" } ] } ] }
std::string costs_to_json(const std::vector<CostSummary>& costs);
std::vector<CostSummary> costs_from_json(std::string_view text);

// mae_table.csv: strategy,horizon,mae_mb,mae_scaled,persistence_mb
void write_mae_table(std::ostream& out, const std::vector<EvalReport>& reports);

}  // namespace fedload::metrics
