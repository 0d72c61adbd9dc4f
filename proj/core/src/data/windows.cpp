#include "fedload/data/windows.hpp"

#include <algorithm>

#include "fedload/common/error.hpp"
#include "fedload/data/series.hpp"

namespace fedload::data {

std::size_t window_count(std::size_t length, std::size_t lookback, std::size_t horizon) {
  return length >= lookback + horizon ? length - lookback - horizon + 1 : 0;
}

WindowedDataset make_windows(const nn::Tensor& series, std::size_t lookback,
                             std::size_t horizon) {
  require(series.rank() == 2, "make_windows: series must be [T x d]");
  require(lookback >= 1 && horizon >= 1, "make_windows: l and s_max must be >= 1");
  const std::size_t length = series.dim(0), width = series.dim(1);
  if (length < lookback + horizon) {
    throw DataError("series of length " + std::to_string(length) +
                    " is too short for windowing; need at least " +
                    std::to_string(lookback + horizon) + " rows");
  }
  const std::size_t n = window_count(length, lookback, horizon);
  WindowedDataset out{nn::Tensor({n, lookback, width}), nn::Tensor({n, horizon})};
  const double* src = series.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(src + i * width, src + (i + lookback) * width,
              out.x.data() + i * lookback * width);
    for (std::size_t s = 0; s < horizon; ++s) {
      out.y.at(i, s) = series.at(i + lookback + s, kLoad);
    }
  }
  return out;
}

WindowedDataset WindowedDataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t l = x.dim(1), d = x.dim(2), s = y.dim(1);
  WindowedDataset out{nn::Tensor({indices.size(), l, d}), nn::Tensor({indices.size(), s})};
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const std::size_t i = indices[b];
    std::copy_n(x.data() + i * l * d, l * d, out.x.data() + b * l * d);
    std::copy_n(y.data() + i * s, s, out.y.data() + b * s);
  }
  return out;
}

WindowedDataset concat(std::span<const WindowedDataset> parts) {
  require(!parts.empty(), "concat: no datasets");
  const nn::Shape xs = parts.front().x.shape();
  const nn::Shape ys = parts.front().y.shape();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p.x.dim(1) == xs[1] && p.x.dim(2) == xs[2] && p.y.dim(1) == ys[1],
            "concat: window shapes differ");
    total += p.size();
  }
  std::vector<double> xv, yv;
  xv.reserve(total * xs[1] * xs[2]);
  yv.reserve(total * ys[1]);
  for (const auto& p : parts) {
    xv.insert(xv.end(), p.x.values().begin(), p.x.values().end());
    yv.insert(yv.end(), p.y.values().begin(), p.y.values().end());
  }
  return {nn::Tensor({total, xs[1], xs[2]}, std::move(xv)),
          nn::Tensor({total, ys[1]}, std::move(yv))};
}

}  // namespace fedload::data
