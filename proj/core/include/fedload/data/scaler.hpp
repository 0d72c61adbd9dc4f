#pragma once

#include <span>
#include <vector>

#include "fedload/nn/tensor.hpp"

namespace fedload::data {

/// Per-feature Min-Max scaler onto [1, 2]: x' = 1 + (x - min) / (max - min).
/// Constant features (max == min) map to 1.5. Values outside the fitted range
/// land outside [1, 2].
struct ScalerParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t width() const { return min.size(); }
  double apply(std::size_t feature, double x) const;
  double invert(std::size_t feature, double scaled) const;
  // max - min of a feature; converts scaled-unit errors to raw units.
  double range(std::size_t feature) const { return max[feature] - min[feature]; }

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

// Fits over the rows of every matrix given (each [T x width]).
ScalerParams fit_scaler(std::span<const nn::Tensor* const> matrices);
ScalerParams fit_scaler(const nn::Tensor& matrix);

nn::Tensor apply_scaler(const ScalerParams& scaler, const nn::Tensor& matrix);
nn::Tensor invert_scaler(const ScalerParams& scaler, const nn::Tensor& matrix);

}  // namespace fedload::data
