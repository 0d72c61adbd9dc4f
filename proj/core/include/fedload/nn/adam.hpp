#pragma once

#include <cstdint>
#include <vector>

#include "fedload/nn/layers.hpp"

namespace fedload::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

/// Moment accumulators for one parameter set. Moments are allocated on the
/// first step and must keep matching the parameter shapes afterwards.
struct AdamState {
  AdamConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::int64_t step = 0;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Bias-corrected Adam update: p -= lr * m_hat / (sqrt(v_hat) + eps).
// Throws ContractError naming the offending block on a non-finite gradient.
void adam_step(const ParamBlocks& params, const ConstParamBlocks& grads,
               AdamState& state, double learning_rate);

template <class Model>
void adam_step(Model& params, const Model& grads, AdamState& state,
               double learning_rate) {
  adam_step(params.blocks(), grads.blocks(), state, learning_rate);
}

}  // namespace fedload::nn
