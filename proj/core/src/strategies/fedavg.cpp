#include "fedload/strategies/fedavg.hpp"

#include <algorithm>
#include <vector>

#include "fedload/common/error.hpp"

namespace fedload::strategies {

void average_blocks(std::span<const nn::ConstParamBlocks> inputs, const nn::ParamBlocks& out) {
  require(!inputs.empty(), "fedavg: no models to aggregate");
  for (const auto& in : inputs) {
    require(in.size() == out.size(), "fedavg: models have different block counts");
    for (std::size_t b = 0; b < out.size(); ++b) {
      if (in[b].name != out[b].name || in[b].tensor->shape() != out[b].tensor->shape()) {
        throw ContractError("fedavg: heterogeneous block '" + in[b].name + "' " +
                            nn::shape_string(in[b].tensor->shape()) + " vs '" + out[b].name +
                            "' " + nn::shape_string(out[b].tensor->shape()));
      }
    }
  }
  const std::size_t n = inputs.size();
  std::vector<double> column(n);
  for (std::size_t b = 0; b < out.size(); ++b) {
    nn::Tensor& dst = *out[b].tensor;
    for (std::size_t i = 0; i < dst.size(); ++i) {
      for (std::size_t k = 0; k < n; ++k) column[k] = (*inputs[k][b].tensor)[i];
      std::sort(column.begin(), column.end());
      if (column.front() == column.back()) {
        dst[i] = column.front();
        continue;
      }
      double sum = 0.0;
      for (double v : column) sum += v;
      dst[i] = sum / static_cast<double>(n);
    }
  }
}

nn::PredictorParams fedavg_aggregate(std::span<const nn::PredictorParams> models) {
  require(!models.empty(), "fedavg: no models to aggregate");
  std::vector<nn::ConstParamBlocks> inputs;
  for (const auto& m : models) inputs.push_back(m.blocks());
  nn::PredictorParams out = models.front();
  average_blocks(inputs, out.blocks());
  return out;
}

nn::LinearLayer fedavg_heads(std::span<const nn::LinearLayer> heads) {
  require(!heads.empty(), "fedavg: no heads to aggregate");
  std::vector<nn::ConstParamBlocks> inputs;
  for (const auto& h : heads) inputs.push_back(nn::head_blocks(h));
  nn::LinearLayer out = heads.front();
  average_blocks(inputs, nn::head_blocks(out));
  return out;
}

}  // namespace fedload::strategies
