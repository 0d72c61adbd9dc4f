#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fedload/data/series.hpp"
#include "fedload/experiment/config.hpp"
#include "fedload/metrics/report.hpp"
#include "fedload/strategies/strategies.hpp"

namespace fedload::experiment {

struct LoadedData {
  std::vector<data::ApSeries> series;            // exactly K APs
  std::vector<std::vector<std::size_t>> groups;  // deployment -> indices into series
};

// Ingests or synthesizes the APs, picks K of them when more are available,
// and partitions them into deployments. Throws DataError / ConfigError.
LoadedData load_data(const ExperimentConfig& config);

struct RunOutputs {
  std::vector<metrics::EvalReport> reports;
  std::vector<metrics::CostSummary> costs;
  std::vector<strategies::RoundLog> rounds;
};

// Trains and evaluates every selected strategy. When `write_files` is set,
// writes report.json, cost.json, rounds.ndjson, mae_table.csv and
// models/*.bin under config.output_dir.
RunOutputs run_experiment(const ExperimentConfig& config, bool write_files = true);

struct CostRow {
  metrics::Strategy strategy;
  std::int64_t bytes = 0;
  double megabytes = 0.0;
};

// Communication cost of all four strategies in the order IL, CL, FL, KD-gen.
std::vector<CostRow> cost_table(const metrics::CommSizes& sizes, std::int64_t rounds,
                                std::int64_t clients_per_round);
void print_cost_table(std::ostream& out, const std::vector<CostRow>& rows);

}  // namespace fedload::experiment
