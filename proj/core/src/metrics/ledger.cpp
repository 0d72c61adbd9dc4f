#include "fedload/metrics/ledger.hpp"

#include <algorithm>

#include "fedload/common/error.hpp"

namespace fedload::metrics {

void CostLedger::add_round_bytes(std::int64_t bytes) {
  require(bytes >= 0, "ledger: negative byte count");
  round_bytes_.push_back(bytes);
  bytes_total_ += bytes;
}

void CostLedger::add_macs(std::int64_t macs) {
  require(macs >= 0, "ledger: negative MAC count");
  mac_total_ += macs;
}

double CostLedger::wall_ms_total() const {
  double total = 0.0;
  for (const auto& t : timings_) {
    if (t.depth == 0) total += t.ms;
  }
  return total;
}

void CostLedger::merge(std::vector<std::pair<int, CostLedger>> parts) {
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [id, part] : parts) {
    for (std::int64_t b : part.round_bytes_) add_round_bytes(b);
    mac_total_ += part.mac_total_;
    for (auto& t : part.timings_) {
      t.label = "deployment " + std::to_string(id) + "/" + t.label;
      timings_.push_back(std::move(t));
    }
  }
}

ScopedTimer::ScopedTimer(CostLedger& ledger, std::string label)
    : ledger_(ledger),
      label_(std::move(label)),
      depth_(ledger.open_scopes_++),
      start_(std::chrono::steady_clock::now()) {}

ScopedTimer::~ScopedTimer() {
  --ledger_.open_scopes_;
  ledger_.timings_.push_back({std::move(label_), elapsed_ms(), depth_});
}

double ScopedTimer::elapsed_ms() const {
  if (ledger_.fixed_clock_) return 0.0;
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
      .count();
}

bool measured_bytes_check(const CostLedger& ledger, std::int64_t formula_bytes) {
  return ledger.bytes_total() == formula_bytes;
}

}  // namespace fedload::metrics
