#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fedload/data/scaler.hpp"
#include "fedload/data/series.hpp"
#include "fedload/data/windows.hpp"

namespace fedload::data {

enum class ScalerScope {
  kPerDeployment,  // each deployment fits on its own training rows
  kGlobal,         // one scaler over every deployment's training rows
};

struct ShardOptions {
  std::size_t lookback = 60;
  std::size_t horizon = 30;
  double train_ratio = 0.8;
  ScalerScope scope = ScalerScope::kPerDeployment;
};

/// Training and test windows for one deployment. Each AP is split
/// chronologically before windowing, so no window crosses the split.
struct DeploymentShard {
  int deployment_id = 0;
  std::vector<std::string> ap_ids;
  ScalerParams scaler;
  WindowedDataset train;
  WindowedDataset test;
};

std::vector<DeploymentShard> build_shards(const std::vector<ApSeries>& series,
                                          const std::vector<std::vector<std::size_t>>& groups,
                                          const ShardOptions& options);

// Canonical dataset dump: `<dir>/ap_<id>.csv` per AP (ingest schema) plus
// `<dir>/manifest.json` mapping ap_id -> deployment_id and carrying each
// deployment's scaler.
void write_dataset_dump(const std::filesystem::path& dir, const std::vector<ApSeries>& series,
                        const std::vector<DeploymentShard>& shards);

struct Manifest {
  std::vector<std::pair<std::string, int>> assignment;  // ap_id -> deployment_id
  std::vector<std::pair<int, ScalerParams>> scalers;
};
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace fedload::data
