#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fedload/common/random.hpp"
#include "fedload/data/partition.hpp"
#include "fedload/data/series.hpp"
#include "fedload/data/shards.hpp"
#include "fedload/nn/layers.hpp"
#include "fedload/nn/models.hpp"
#include "fedload/nn/tensor.hpp"

namespace fedload::testing {

inline nn::Tensor random_tensor(nn::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  nn::Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.values()) v = u(rng);
  return t;
}

// Small enough that finite differences over every parameter stay fast.
inline nn::ModelDims tiny_dims() { return {4, 5, 4, 5, 4, 3, 6}; }

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

// |a - n| / max(|a| + |n|, floor). The floor keeps entries whose true
// gradient is ~0 from dividing round-off by round-off.
inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), floor);
}

// Central differences of `loss` over every entry of `params`, against the
// matching entries of `analytic`.
inline GradCheck check_gradient(const nn::ParamBlocks& params, const nn::ConstParamBlocks& analytic,
                                const std::function<double()>& loss, double h = 1e-5) {
  GradCheck out;
  for (std::size_t b = 0; b < params.size(); ++b) {
    nn::Tensor& p = *params[b].tensor;
    const nn::Tensor& g = *analytic[b].tensor;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + h;
      const double up = loss();
      p[i] = saved - h;
      const double down = loss();
      p[i] = saved;
      out.max_rel_error = std::max(out.max_rel_error, rel_error(g[i], (up - down) / (2 * h)));
      ++out.checked;
    }
  }
  return out;
}

inline GradCheck check_gradient(nn::Tensor& param, const nn::Tensor& analytic,
                                const std::function<double()>& loss, double h = 1e-5) {
  return check_gradient(nn::ParamBlocks{{"x", &param}}, nn::ConstParamBlocks{{"x", &analytic}},
                        loss, h);
}

// Smooth scalar probe: sum(r * out).
inline double project(const nn::Tensor& out, const nn::Tensor& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * r[i];
  return s;
}

// Targets displaced from `pred` by 0.1..0.5 in a random direction, so an L1
// loss keeps every residual sign under small parameter perturbations.
inline nn::Tensor offset_targets(const nn::Tensor& pred, Rng& rng) {
  nn::Tensor y(pred.shape());
  std::uniform_real_distribution<double> mag(0.1, 0.5);
  std::bernoulli_distribution up(0.5);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = pred[i] + (up(rng) ? mag(rng) : -mag(rng));
  return y;
}

// Synthetic shards for strategy tests.
inline std::vector<data::DeploymentShard> synthetic_shards(const nn::ModelDims& dims,
                                                           std::size_t aps, std::size_t groups,
                                                           std::size_t days,
                                                           std::uint64_t seed = 7) {
  const auto series = data::synth_generate({seed, aps, days});
  std::vector<std::vector<std::size_t>> parts(groups);
  for (std::size_t i = 0; i < aps; ++i) parts[i % groups].push_back(i);
  return data::build_shards(series, parts, {dims.lookback, dims.horizon, 0.8,
                                            data::ScalerScope::kPerDeployment});
}

}  // namespace fedload::testing
