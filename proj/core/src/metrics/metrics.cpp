#include "fedload/metrics/metrics.hpp"

#include <cmath>

#include "fedload/common/error.hpp"

namespace fedload::metrics {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kIcl: return "icl";
    case Strategy::kDscl: return "dscl";
    case Strategy::kFl: return "fl";
    case Strategy::kKdgen: return "kdgen";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view tag) {
  if (tag == "icl" || tag == "il") return Strategy::kIcl;
  if (tag == "dscl" || tag == "cl") return Strategy::kDscl;
  if (tag == "fl") return Strategy::kFl;
  if (tag == "kdgen" || tag == "kd-gen") return Strategy::kKdgen;
  throw ConfigError("unknown strategy '" + std::string(tag) +
                    "' (expected icl, dscl, fl or kdgen)");
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ContractError("mae: length mismatch " + std::to_string(pred.size()) + " vs " +
                        std::to_string(truth.size()));
  }
  require(!pred.empty(), "mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

CommSizes CommSizes::paper() {
  // 750 MB dataset, 100 APs, 3.7 MB model, 0.002 MB head, 0.113 MB generator.
  return {750'000'000, 100, 3'700'000, 2'000, 113'000};
}

std::int64_t comm_cost_bytes(Strategy strategy, const CommSizes& sizes,
                             std::int64_t total_client_rounds) {
  require(sizes.dataset_bytes >= 0 && sizes.num_clients >= 0 && sizes.model_bytes >= 0 &&
              sizes.head_bytes >= 0 && sizes.generator_bytes >= 0 && total_client_rounds >= 0,
          "comm_cost: sizes must be non-negative");
  switch (strategy) {
    case Strategy::kDscl:
      return sizes.dataset_bytes + sizes.num_clients * sizes.model_bytes;
    case Strategy::kFl:
      return 2 * sizes.model_bytes * total_client_rounds;
    case Strategy::kKdgen:
      return (2 * sizes.head_bytes + sizes.generator_bytes) * total_client_rounds;
    case Strategy::kIcl:
      return 0;
  }
  throw ContractError("comm_cost: unknown strategy");
}

double comm_cost_mb(Strategy strategy, const CommSizes& sizes, std::int64_t rounds,
                    std::int64_t clients_per_round) {
  return static_cast<double>(comm_cost_bytes(strategy, sizes, rounds, clients_per_round)) /
         kBytesPerMegabyte;
}

}  // namespace fedload::metrics
