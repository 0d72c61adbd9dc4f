#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fedload::metrics {

enum class Strategy { kIcl, kDscl, kFl, kKdgen };

inline constexpr std::array<Strategy, 4> kAllStrategies = {Strategy::kIcl, Strategy::kDscl,
                                                           Strategy::kFl, Strategy::kKdgen};

std::string_view to_string(Strategy s);
// Accepts icl/il, dscl/cl, fl, kdgen/kd-gen. Throws ConfigError otherwise.
Strategy parse_strategy(std::string_view tag);

// Mean absolute error. Throws ContractError on length mismatch or empty input.
double mae(std::span<const double> pred, std::span<const double> truth);

/// Payload sizes in bytes. Megabytes are 10^6 bytes.
struct CommSizes {
  std::int64_t dataset_bytes = 0;    // sum_k D^(k)
  std::int64_t num_clients = 0;      // K
  std::int64_t model_bytes = 0;      // |theta|
  std::int64_t head_bytes = 0;       // |g_r(theta)|
  std::int64_t generator_bytes = 0;  // |omega|

  static CommSizes paper();
};

inline constexpr double kBytesPerMegabyte = 1e6;

// Communication cost of a whole run:
//   CL:     sum_k D^(k) + K |theta|
//   FL:     2 |theta| sum_t |S_t|
//   KD-gen: (2 |g_r| + |omega|) sum_t |S_t|
//   IL:     0
std::int64_t comm_cost_bytes(Strategy strategy, const CommSizes& sizes,
                             std::int64_t total_client_rounds);
inline std::int64_t comm_cost_bytes(Strategy strategy, const CommSizes& sizes,
                                    std::int64_t rounds, std::int64_t clients_per_round) {
  return comm_cost_bytes(strategy, sizes, rounds * clients_per_round);
}
double comm_cost_mb(Strategy strategy, const CommSizes& sizes, std::int64_t rounds,
                    std::int64_t clients_per_round);

}  // namespace fedload::metrics
