#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedload/common/random.hpp"
#include "fedload/nn/tensor.hpp"

namespace fedload::kdgen {

inline constexpr double kVarianceFloor = 1e-6;

/// A client's label distribution summarized as one Gaussian over its pooled
/// scaled labels. `weight` is the number of label windows.
struct LabelDistribution {
  double mean = 0.0;
  double variance = 0.0;
  std::int64_t weight = 1;

  friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;
};

struct MixtureComponent {
  double mean = 0.0;
  double variance = kVarianceFloor;
  double weight = 0.0;

  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Server-side Gaussian mixture, one component per reporting client.
struct GlobalMixture {
  std::vector<MixtureComponent> components;

  double mean() const;
  friend bool operator==(const GlobalMixture&, const GlobalMixture&) = default;
};

// labels: [N x s_max]. Population variance over all N*s_max entries.
LabelDistribution empirical_distribution(const nn::Tensor& labels);

// Weights normalized by total window count; variances floored at kVarianceFloor.
GlobalMixture gmm_aggregate(std::span<const LabelDistribution> clients);

// [n x horizon], each entry drawn independently (component by weight, then
// Gaussian) and clipped to [1, 2].
nn::Tensor sample_mixture(const GlobalMixture& mixture, std::size_t n, std::size_t horizon,
                          Rng& rng);

}  // namespace fedload::kdgen
