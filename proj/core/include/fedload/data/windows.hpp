#pragma once

#include <span>
#include <vector>

#include "fedload/nn/tensor.hpp"

namespace fedload::data {

/// Sliding windows over a scaled series: x[i] = rows [i, i+l), y[i] = load
/// at rows [i+l, i+l+s_max).
struct WindowedDataset {
  nn::Tensor x;  // [N x l x d]
  nn::Tensor y;  // [N x s_max]

  std::size_t size() const { return y.empty() ? 0 : y.dim(0); }
  std::size_t lookback() const { return x.dim(1); }
  std::size_t horizon() const { return y.dim(1); }

  // Copies the selected windows into a batch.
  WindowedDataset gather(std::span<const std::size_t> indices) const;

  friend bool operator==(const WindowedDataset&, const WindowedDataset&) = default;
};

std::size_t window_count(std::size_t length, std::size_t lookback, std::size_t horizon);

// Throws DataError if the series is shorter than lookback + horizon.
WindowedDataset make_windows(const nn::Tensor& series, std::size_t lookback,
                             std::size_t horizon);

// Stacks datasets in order. All parts must share l, d and s_max.
WindowedDataset concat(std::span<const WindowedDataset> parts);

}  // namespace fedload::data
