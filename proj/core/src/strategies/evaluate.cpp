#include "fedload/strategies/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "fedload/common/error.hpp"
#include "fedload/metrics/metrics.hpp"

namespace fedload::strategies {

nn::Tensor predict_all(const nn::PredictorParams& model, const data::WindowedDataset& windows) {
  constexpr std::size_t kChunk = 256;
  const std::size_t n = windows.size();
  const std::size_t width = model.head.out_dim();
  nn::Tensor out({n, width});
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += kChunk) {
    idx.resize(std::min(kChunk, n - start));
    std::iota(idx.begin(), idx.end(), start);
    const nn::Tensor pred = nn::predictor_forward(model, windows.gather(idx).x).prediction;
    std::copy(pred.values().begin(), pred.values().end(), out.data() + start * width);
  }
  return out;
}

nn::Tensor persistence_predictions(const data::WindowedDataset& windows) {
  const std::size_t n = windows.size(), l = windows.lookback(), s = windows.horizon();
  nn::Tensor out({n, s});
  for (std::size_t i = 0; i < n; ++i) {
    const double last = windows.x.at(i, l - 1, data::kLoad);
    for (std::size_t j = 0; j < s; ++j) out.at(i, j) = last;
  }
  return out;
}

metrics::DeploymentEval evaluate_predictions(const nn::Tensor& predictions,
                                             const data::DeploymentShard& shard,
                                             std::span<const std::size_t> horizons) {
  const data::WindowedDataset& test = shard.test;
  if (test.size() == 0) {
    throw ContractError("evaluate: deployment " + std::to_string(shard.deployment_id) +
                        " has an empty test split");
  }
  require_shape(predictions, test.y.shape(), "evaluate predictions");
  const nn::Tensor persistence = persistence_predictions(test);
  const double mb_per_unit = shard.scaler.range(data::kLoad) / metrics::kBytesPerMegabyte;

  metrics::DeploymentEval eval;
  eval.deployment_id = shard.deployment_id;
  std::vector<double> pred(test.size()), base(test.size()), truth(test.size());
  for (std::size_t s : horizons) {
    require(s >= 1 && s <= test.horizon(),
            "evaluate: horizon " + std::to_string(s) + " outside [1, " +
                std::to_string(test.horizon()) + "]");
    for (std::size_t i = 0; i < test.size(); ++i) {
      pred[i] = predictions.at(i, s - 1);
      base[i] = persistence.at(i, s - 1);
      truth[i] = test.y.at(i, s - 1);
    }
    const double model_mae = metrics::mae(pred, truth);
    const double base_mae = metrics::mae(base, truth);
    eval.mae_scaled.push_back(model_mae);
    eval.mae_mb.push_back(model_mae * mb_per_unit);
    eval.persistence_scaled.push_back(base_mae);
    eval.persistence_mb.push_back(base_mae * mb_per_unit);
  }
  return eval;
}

metrics::DeploymentEval evaluate(const nn::PredictorParams& model,
                                 const data::DeploymentShard& shard,
                                 std::span<const std::size_t> horizons) {
  return evaluate_predictions(predict_all(model, shard.test), shard, horizons);
}

}  // namespace fedload::strategies
