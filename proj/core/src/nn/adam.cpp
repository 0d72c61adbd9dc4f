#include "fedload/nn/adam.hpp"

#include <cmath>

#include "fedload/common/error.hpp"

namespace fedload::nn {

void adam_step(const ParamBlocks& params, const ConstParamBlocks& grads,
               AdamState& state, double learning_rate) {
  require(params.size() == grads.size(), "adam_step: parameter/gradient block count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_shape(*grads[i].tensor, params[i].tensor->shape(), params[i].name.c_str());
    if (!grads[i].tensor->all_finite()) {
      throw ContractError("adam_step: non-finite gradient in block '" +
                          params[i].name + "'");
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Tensor::zeros_like(*p.tensor));
      state.second_moment.push_back(Tensor::zeros_like(*p.tensor));
    }
  }
  require(state.first_moment.size() == params.size(),
          "adam_step: optimizer state does not match parameter blocks");

  ++state.step;
  const auto& cfg = state.config;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i].tensor;
    const Tensor& g = *grads[i].tensor;
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    require_shape(m, p.shape(), "adam_step moment");
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace fedload::nn
