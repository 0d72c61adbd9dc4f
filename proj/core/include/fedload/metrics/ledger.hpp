#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedload/metrics/metrics.hpp"

namespace fedload::metrics {

struct TimingRecord {
  std::string label;
  double ms = 0.0;
  int depth = 0;  // 0 for top-level scopes
};

/// Per-run accounting of measured bytes on the wire, wall-clock time and
/// multiply-accumulates. bytes_total always equals the sum of round_bytes.
class CostLedger {
 public:
  explicit CostLedger(Strategy strategy = Strategy::kIcl, bool fixed_clock = false)
      : strategy_(strategy), fixed_clock_(fixed_clock) {}

  Strategy strategy() const { return strategy_; }
  bool fixed_clock() const { return fixed_clock_; }

  // Serialized payload bytes moved during one round (or one transfer phase).
  void add_round_bytes(std::int64_t bytes);
  void add_macs(std::int64_t macs);

  std::int64_t bytes_total() const { return bytes_total_; }
  const std::vector<std::int64_t>& round_bytes() const { return round_bytes_; }
  std::int64_t mac_total() const { return mac_total_; }
  double wall_ms_total() const;
  const std::vector<TimingRecord>& timings() const { return timings_; }

  // Appends records from per-client ledgers, in deployment_id order.
  void merge(std::vector<std::pair<int, CostLedger>> parts);

 private:
  friend class ScopedTimer;

  Strategy strategy_;
  bool fixed_clock_;
  std::int64_t bytes_total_ = 0;
  std::int64_t mac_total_ = 0;
  std::vector<std::int64_t> round_bytes_;
  std::vector<TimingRecord> timings_;
  int open_scopes_ = 0;
};

/// RAII wall-clock scope on a monotonic clock. Records are appended in
/// completion order; nested scopes carry depth > 0. Under a fixed clock every
/// scope records 0 ms.
class ScopedTimer {
 public:
  ScopedTimer(CostLedger& ledger, std::string label);
  ~ScopedTimer();
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

  double elapsed_ms() const;

 private:
  CostLedger& ledger_;
  std::string label_;
  int depth_;
  std::chrono::steady_clock::time_point start_;
};

// True iff measured serialized bytes equal the formula bytes exactly.
bool measured_bytes_check(const CostLedger& ledger, std::int64_t formula_bytes);

}  // namespace fedload::metrics
