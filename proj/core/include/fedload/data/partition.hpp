#pragma once

#include <cstdint>
#include <vector>

namespace fedload::data {

struct PartitionOptions {
  std::size_t num_items = 100;       // K
  std::size_t num_groups = 20;       // U
  double alpha = 1.0;                // Dirichlet concentration
  std::size_t min_size = 4;
  std::size_t max_size = 6;
  std::uint64_t seed = 42;
};

// Group sizes: round(K * Dirichlet(alpha * 1_U)), then repaired by moving
// items from the largest to the smallest group until every size lies in
// [min_size, max_size] and the sizes sum to K. Throws ConfigError when the
// bounds cannot be met.
std::vector<std::size_t> dirichlet_group_sizes(const PartitionOptions& options);

// groups[u] lists item indices (sorted) assigned to group u. Items are
// shuffled with the same seed before being dealt out by size.
std::vector<std::vector<std::size_t>> dirichlet_partition(const PartitionOptions& options);

}  // namespace fedload::data
