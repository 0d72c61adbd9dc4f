#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fedload {

using Rng = std::mt19937_64;

// Derives an independent, reproducible seed for a named stream. Every source
// of randomness in a run is keyed by (master seed, tag, index) so that adding
// or reordering consumers never perturbs the others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::string_view tag,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(master, tag, index));
}

}  // namespace fedload
