#pragma once

#include "fedload/nn/tensor.hpp"

namespace fedload::nn {

struct LossResult {
  double value = 0.0;
  Tensor grad;  // dL/dpred, same shape as pred
};

// Mean absolute error over every element. The subgradient at pred == target
// is 0.
LossResult l1_loss(const Tensor& pred, const Tensor& target);

}  // namespace fedload::nn
