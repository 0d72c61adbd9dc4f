#include "fedload/kdgen/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "fedload/common/error.hpp"

namespace fedload::kdgen {

double GlobalMixture::mean() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * c.mean;
  return m;
}

LabelDistribution empirical_distribution(const nn::Tensor& labels) {
  require(!labels.empty(), "empirical_distribution: no labels");
  // Welford accumulation.
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double v : labels.values()) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  const auto windows = static_cast<std::int64_t>(labels.rank() >= 2 ? labels.dim(0) : n);
  return {mean, std::max(0.0, m2 / static_cast<double>(n)), windows};
}

GlobalMixture gmm_aggregate(std::span<const LabelDistribution> clients) {
  require(!clients.empty(), "gmm_aggregate: no client distributions");
  double total = 0.0;
  for (const auto& c : clients) {
    require(c.weight >= 1, "gmm_aggregate: client weight must be >= 1");
    total += static_cast<double>(c.weight);
  }
  GlobalMixture mixture;
  for (const auto& c : clients) {
    mixture.components.push_back({c.mean, std::max(c.variance, kVarianceFloor),
                                  static_cast<double>(c.weight) / total});
  }
  return mixture;
}

nn::Tensor sample_mixture(const GlobalMixture& mixture, std::size_t n, std::size_t horizon,
                          Rng& rng) {
  require(!mixture.components.empty(), "sample_mixture: empty mixture");
  std::vector<double> weights;
  for (const auto& c : mixture.components) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> standard(0.0, 1.0);

  nn::Tensor out({n, horizon});
  for (double& v : out.values()) {
    const auto& c = mixture.components[pick(rng)];
    v = std::clamp(c.mean + std::sqrt(c.variance) * standard(rng), 1.0, 2.0);
  }
  return out;
}

}  // namespace fedload::kdgen
