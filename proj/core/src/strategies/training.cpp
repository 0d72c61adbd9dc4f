#include "fedload/strategies/training.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "fedload/common/error.hpp"

namespace fedload::strategies {

LocalUpdateResult client_local_update(nn::PredictorParams& model, nn::AdamState& optimizer,
                                      const data::WindowedDataset& train, std::size_t epochs,
                                      const TrainConfig& config, Rng& shuffle_rng,
                                      const KdContext* kd) {
  require(train.size() > 0, "client_local_update: empty training shard");
  require(config.batch > 0, "client_local_update: batch size must be > 0");
  LocalUpdateResult result;
  std::vector<std::size_t> order(train.size());

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    // fresh permutation each epoch: k one-epoch calls match one k-epoch call
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const data::WindowedDataset batch = train.gather(idx);

      nn::PredictorParams grad = nn::PredictorParams::zeros_like(model);
      double loss = 0.0;
      if (kd != nullptr) {
        const kdgen::SyntheticBatch synthetic =
            kdgen::draw_synthetic_batch(*kd->generator, kd->dims, idx.size(), *kd->rng);
        loss = kdgen::kd_local_loss(model, batch.x, batch.y, &synthetic, kd->lambda, grad).total;
      } else {
        loss = nn::predictor_l1_loss(model, batch.x, batch.y, grad);
      }
      nn::adam_step(model, grad, optimizer, config.learning_rate);
      weighted += loss * static_cast<double>(idx.size());
    }
    result.epoch_losses.push_back(weighted / static_cast<double>(order.size()));
    result.samples += static_cast<std::int64_t>(order.size());
  }
  return result;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += threads) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::size_t> select_clients(std::size_t n, std::size_t count, Rng& rng) {
  require(count <= n, "select_clients: cannot pick " + std::to_string(count) + " of " +
                          std::to_string(n) + " clients");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace fedload::strategies
