#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fedload/common/random.hpp"
#include "fedload/data/windows.hpp"
#include "fedload/kdgen/distill.hpp"
#include "fedload/nn/adam.hpp"
#include "fedload/nn/models.hpp"
#include "fedload/strategies/config.hpp"

namespace fedload::strategies {

/// Generator context for the KD-gen flavour of a local update.
struct KdContext {
  const nn::GeneratorParams* generator = nullptr;
  nn::ModelDims dims;
  double lambda = 1.0;
  Rng* rng = nullptr;  // draws Y_hat and eps
};

struct LocalUpdateResult {
  std::vector<double> epoch_losses;  // sample-weighted mean loss per epoch
  std::int64_t samples = 0;          // windows processed, summed over epochs
};

// `epochs` passes of shuffled mini-batches (size B, last partial batch kept),
// one Adam step per batch. Plain L1 without `kd`, l' with it.
LocalUpdateResult client_local_update(nn::PredictorParams& model, nn::AdamState& optimizer,
                                      const data::WindowedDataset& train, std::size_t epochs,
                                      const TrainConfig& config, Rng& shuffle_rng,
                                      const KdContext* kd = nullptr);

// Runs task(i) for i in [0, n) on up to `workers` threads. Each task must
// touch disjoint state. The first exception (by index) is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task);

// S distinct indices out of [0, n), uniformly at random, returned sorted.
std::vector<std::size_t> select_clients(std::size_t n, std::size_t count, Rng& rng);

}  // namespace fedload::strategies
