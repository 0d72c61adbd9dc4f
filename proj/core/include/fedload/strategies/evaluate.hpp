#pragma once

#include <span>
#include <vector>

#include "fedload/data/shards.hpp"
#include "fedload/metrics/report.hpp"
#include "fedload/nn/models.hpp"

namespace fedload::strategies {

inline const std::vector<std::size_t> kDefaultHorizons = {1, 5, 15, 30};

// Predictions for every window of `windows`, computed in chunks.
nn::Tensor predict_all(const nn::PredictorParams& model, const data::WindowedDataset& windows);

// Persistence baseline: the last observed (scaled) load repeated for every step.
nn::Tensor persistence_predictions(const data::WindowedDataset& windows);

// MAE per horizon s on column s-1, in scaled units and in MB via the shard's
// load range. Throws ContractError on an empty test split or a horizon
// beyond the prediction width.
metrics::DeploymentEval evaluate_predictions(const nn::Tensor& predictions,
                                             const data::DeploymentShard& shard,
                                             std::span<const std::size_t> horizons);

metrics::DeploymentEval evaluate(const nn::PredictorParams& model,
                                 const data::DeploymentShard& shard,
                                 std::span<const std::size_t> horizons);

}  // namespace fedload::strategies
