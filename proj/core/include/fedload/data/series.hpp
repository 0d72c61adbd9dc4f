#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fedload/nn/tensor.hpp"

namespace fedload::data {

inline constexpr std::int64_t kBinSeconds = 120;
inline constexpr std::size_t kFeatureCount = 4;

// Column layout of ApSeries::features.
enum Feature : std::size_t { kLoad = 0, kUsers = 1, kHour = 2, kWeekday = 3 };

struct RawRecord {
  std::int64_t timestamp = 0;  // seconds, UTC
  std::string ap_id;
  std::uint64_t load_bytes = 0;
  std::uint64_t num_users = 0;
};

/// Regularly sampled per-AP series; row i covers [start + i*step, start + (i+1)*step).
struct ApSeries {
  std::string ap_id;
  std::int64_t start_time = 0;
  std::int64_t step_seconds = kBinSeconds;
  nn::Tensor features;  // [T x 4]: load, users, hour-of-day, day-of-week (Mon = 0)

  std::size_t length() const { return features.empty() ? 0 : features.dim(0); }

  friend bool operator==(const ApSeries&, const ApSeries&) = default;
};

int hour_of_day(std::int64_t timestamp);
int day_of_week(std::int64_t timestamp);  // Monday = 0

// Groups records by AP, bins them into 120 s steps (load summed, users max),
// fills gaps with zeros and appends time features. Output is sorted by ap_id.
std::vector<ApSeries> aggregate_records(std::vector<RawRecord> records);

// Parses `timestamp,ap_id,load_bytes,num_users` CSV with header.
// Throws DataError naming the line on malformed rows, or if empty.
std::vector<RawRecord> parse_csv(std::istream& in);
std::vector<ApSeries> ingest_csv(const std::filesystem::path& path);

// Canonical CSV: one row per bin (gap bins included), same schema as input.
// Re-ingesting it reproduces the series exactly.
void write_csv(std::ostream& out, const std::vector<ApSeries>& series);
void write_csv(const std::filesystem::path& path, const std::vector<ApSeries>& series);

struct SynthOptions {
  std::uint64_t seed = 42;
  std::size_t n_aps = 8;
  std::size_t days = 3;
  std::int64_t start_time = 1672617600;  // Monday 2023-01-02 00:00 UTC
};

// Diurnal/weekly load profiles with lognormal noise and per-AP parameters.
std::vector<ApSeries> synth_generate(const SynthOptions& options);

// First floor(ratio * T) rows train, remainder test.
std::pair<ApSeries, ApSeries> chrono_split(const ApSeries& series, double train_ratio);

}  // namespace fedload::data
