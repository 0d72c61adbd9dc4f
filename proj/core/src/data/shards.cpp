#include "fedload/data/shards.hpp"

#include "fedload/common/error.hpp"

namespace fedload::data {

std::vector<DeploymentShard> build_shards(const std::vector<ApSeries>& series,
                                          const std::vector<std::vector<std::size_t>>& groups,
                                          const ShardOptions& options) {
  // Split every referenced AP once.
  std::vector<std::vector<std::pair<ApSeries, ApSeries>>> splits(groups.size());
  for (std::size_t u = 0; u < groups.size(); ++u) {
    require(!groups[u].empty(), "build_shards: empty deployment " + std::to_string(u));
    for (std::size_t idx : groups[u]) {
      require(idx < series.size(), "build_shards: AP index out of range");
      splits[u].push_back(chrono_split(series[idx], options.train_ratio));
    }
  }

  ScalerParams global;
  if (options.scope == ScalerScope::kGlobal) {
    std::vector<const nn::Tensor*> all;
    for (const auto& group : splits) {
      for (const auto& s : group) all.push_back(&s.first.features);
    }
    global = fit_scaler(all);
  }

  std::vector<DeploymentShard> shards;
  for (std::size_t u = 0; u < groups.size(); ++u) {
    DeploymentShard shard;
    shard.deployment_id = static_cast<int>(u);
    std::vector<const nn::Tensor*> train_rows;
    for (const auto& s : splits[u]) {
      shard.ap_ids.push_back(s.first.ap_id);
      train_rows.push_back(&s.first.features);
    }
    shard.scaler = options.scope == ScalerScope::kGlobal ? global : fit_scaler(train_rows);

    std::vector<WindowedDataset> train, test;
    for (const auto& [tr, te] : splits[u]) {
      try {
        train.push_back(make_windows(apply_scaler(shard.scaler, tr.features),
                                     options.lookback, options.horizon));
        test.push_back(make_windows(apply_scaler(shard.scaler, te.features),
                                    options.lookback, options.horizon));
      } catch (const DataError& e) {
        throw DataError("AP " + tr.ap_id + ": " + e.what());
      }
    }
    shard.train = concat(train);
    shard.test = concat(test);
    shards.push_back(std::move(shard));
  }
  return shards;
}

}  // namespace fedload::data
