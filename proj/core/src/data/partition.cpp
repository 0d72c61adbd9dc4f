#include "fedload/data/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedload/common/error.hpp"
#include "fedload/common/random.hpp"

namespace fedload::data {

std::vector<std::size_t> dirichlet_group_sizes(const PartitionOptions& o) {
  if (o.num_groups == 0 || o.min_size > o.max_size ||
      o.num_groups * o.min_size > o.num_items || o.num_groups * o.max_size < o.num_items) {
    throw ConfigError("cannot split " + std::to_string(o.num_items) + " APs into " +
                      std::to_string(o.num_groups) + " deployments of " +
                      std::to_string(o.min_size) + "-" + std::to_string(o.max_size) +
                      " APs");
  }
  if (!(o.alpha > 0.0)) throw ConfigError("Dirichlet alpha must be > 0");

  Rng rng = make_rng(o.seed, "dirichlet-sizes");
  std::gamma_distribution<double> gamma(o.alpha, 1.0);
  std::vector<double> draws(o.num_groups);
  for (double& g : draws) g = gamma(rng);
  const double total = std::accumulate(draws.begin(), draws.end(), 0.0);

  std::vector<long> sizes(o.num_groups);
  for (std::size_t u = 0; u < o.num_groups; ++u) {
    const double share = total > 0.0 ? draws[u] / total : 1.0 / o.num_groups;
    sizes[u] = std::lround(static_cast<double>(o.num_items) * share);
  }

  const long lo = static_cast<long>(o.min_size), hi = static_cast<long>(o.max_size);
  const long target = static_cast<long>(o.num_items);
  // Ties resolve to the lowest index so the repair is deterministic.
  auto largest = [&] { return std::max_element(sizes.begin(), sizes.end()); };
  auto smallest = [&] { return std::min_element(sizes.begin(), sizes.end()); };
  for (auto& s : sizes) s = std::clamp(s, 0L, hi + target);
  while (true) {
    const long sum = std::accumulate(sizes.begin(), sizes.end(), 0L);
    auto big = largest();
    auto small = smallest();
    if (sum > target) {
      --*big;
    } else if (sum < target) {
      ++*small;
    } else if (*big > hi || *small < lo) {
      --*big;
      ++*small;
    } else {
      break;
    }
  }
  return {sizes.begin(), sizes.end()};
}

std::vector<std::vector<std::size_t>> dirichlet_partition(const PartitionOptions& o) {
  const std::vector<std::size_t> sizes = dirichlet_group_sizes(o);
  std::vector<std::size_t> items(o.num_items);
  std::iota(items.begin(), items.end(), std::size_t{0});
  Rng rng = make_rng(o.seed, "dirichlet-assign");
  std::shuffle(items.begin(), items.end(), rng);

  std::vector<std::vector<std::size_t>> groups(sizes.size());
  std::size_t next = 0;
  for (std::size_t u = 0; u < sizes.size(); ++u) {
    groups[u].assign(items.begin() + static_cast<long>(next),
                     items.begin() + static_cast<long>(next + sizes[u]));
    std::sort(groups[u].begin(), groups[u].end());
    next += sizes[u];
  }
  return groups;
}

}  // namespace fedload::data
