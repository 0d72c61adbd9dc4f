#include "fedload/nn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "fedload/common/error.hpp"

namespace fedload::nn {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += " x ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  require(values_.size() == shape_size(shape_),
          "tensor value count " + std::to_string(values_.size()) +
              " does not match shape " + shape_string(shape_));
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t width = values_.size() / shape_[0];
  return std::span<double>(values_).subspan(r * width, width);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t width = values_.size() / shape_[0];
  return std::span<const double>(values_).subspan(r * width, width);
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require(same_shape(other), "tensor += shape mismatch: " + shape_string(shape_) +
                                 " vs " + shape_string(other.shape_));
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Tensor& Tensor::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

void require_shape(const Tensor& t, const Shape& expected, const char* what) {
  if (t.shape() != expected) {
    throw ContractError(std::string(what) + ": expected shape " +
                        shape_string(expected) + ", got " +
                        shape_string(t.shape()));
  }
}

}  // namespace fedload::nn
