#include "fedload/nn/loss.hpp"

#include <cmath>

#include "fedload/common/error.hpp"

namespace fedload::nn {

LossResult l1_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) {
    throw ContractError("l1_loss: pred " + shape_string(pred.shape()) +
                        " vs target " + shape_string(target.shape()));
  }
  require(!pred.empty(), "l1_loss: empty tensors");
  LossResult out{0.0, Tensor::zeros_like(pred)};
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    sum += std::abs(diff);
    out.grad[i] = diff > 0.0 ? inv_n : (diff < 0.0 ? -inv_n : 0.0);
  }
  out.value = sum * inv_n;
  return out;
}

}  // namespace fedload::nn
