#include "fedload/data/scaler.hpp"

#include <algorithm>
#include <limits>

#include "fedload/common/error.hpp"

namespace fedload::data {

double ScalerParams::apply(std::size_t feature, double x) const {
  const double span = max[feature] - min[feature];
  if (span == 0.0) return 1.5;
  return 1.0 + (x - min[feature]) / span;
}

double ScalerParams::invert(std::size_t feature, double scaled) const {
  const double span = max[feature] - min[feature];
  if (span == 0.0) return min[feature];
  return min[feature] + (scaled - 1.0) * span;
}

ScalerParams fit_scaler(std::span<const nn::Tensor* const> matrices) {
  require(!matrices.empty(), "fit_scaler: no data");
  const std::size_t width = matrices.front()->dim(1);
  ScalerParams p{std::vector<double>(width, std::numeric_limits<double>::infinity()),
                 std::vector<double>(width, -std::numeric_limits<double>::infinity())};
  std::size_t rows = 0;
  for (const nn::Tensor* m : matrices) {
    require(m->rank() == 2 && m->dim(1) == width, "fit_scaler: inconsistent widths");
    for (std::size_t r = 0; r < m->dim(0); ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        p.min[c] = std::min(p.min[c], m->at(r, c));
        p.max[c] = std::max(p.max[c], m->at(r, c));
      }
    }
    rows += m->dim(0);
  }
  require(rows > 0, "fit_scaler: no rows");
  return p;
}

ScalerParams fit_scaler(const nn::Tensor& matrix) {
  const nn::Tensor* one[] = {&matrix};
  return fit_scaler(one);
}

nn::Tensor apply_scaler(const ScalerParams& scaler, const nn::Tensor& matrix) {
  require(matrix.rank() == 2 && matrix.dim(1) == scaler.width(),
          "apply_scaler: width mismatch");
  nn::Tensor out = matrix;
  for (std::size_t r = 0; r < out.dim(0); ++r) {
    for (std::size_t c = 0; c < out.dim(1); ++c) out.at(r, c) = scaler.apply(c, out.at(r, c));
  }
  return out;
}

nn::Tensor invert_scaler(const ScalerParams& scaler, const nn::Tensor& matrix) {
  require(matrix.rank() == 2 && matrix.dim(1) == scaler.width(),
          "invert_scaler: width mismatch");
  nn::Tensor out = matrix;
  for (std::size_t r = 0; r < out.dim(0); ++r) {
    for (std::size_t c = 0; c < out.dim(1); ++c) out.at(r, c) = scaler.invert(c, out.at(r, c));
  }
  return out;
}

}  // namespace fedload::data
