#pragma once

#include <span>

#include "fedload/common/random.hpp"
#include "fedload/kdgen/mixture.hpp"
#include "fedload/nn/adam.hpp"
#include "fedload/nn/models.hpp"

namespace fedload::kdgen {

/// Generator-induced features and the labels they were conditioned on.
struct SyntheticBatch {
  nn::Tensor latent;  // Z_hat [n x z_dim]
  nn::Tensor labels;  // Y_hat [n x s_max]
};

// Client-side draw: Y_hat ~ U[1,2]^{n x s_max}, eps ~ N(0,1), Z_hat = G(Y_hat, eps).
SyntheticBatch draw_synthetic_batch(const nn::GeneratorParams& gen, const nn::ModelDims& dims,
                                    std::size_t n, Rng& rng);

struct KdLoss {
  double total = 0.0;
  double real = 0.0;
  double synthetic = 0.0;
};

// l' = L1(f(x), y) + lambda * L1(head(Z_hat), Y_hat). Z_hat is a constant:
// the second term only reaches the head. Gradients accumulate into `grad`.
// With lambda == 0 (or no synthetic batch) this is exactly predictor_l1_loss.
KdLoss kd_local_loss(const nn::PredictorParams& model, const nn::Tensor& x,
                     const nn::Tensor& y, const SyntheticBatch* synthetic, double lambda,
                     nn::PredictorParams& grad);

// (1/K) sum_k weight_k * L1(head_k(G(labels, noise)), labels). Accumulates
// dL/domega into `grad` when non-null. Heads are read-only.
double generator_loss(const nn::GeneratorParams& gen,
                      std::span<const nn::LinearLayer* const> heads,
                      std::span<const double> weights, const nn::Tensor& labels,
                      const nn::Tensor& noise, nn::GeneratorParams* grad);

struct GeneratorUpdateOptions {
  std::size_t batch = 32;
  double learning_rate = 0.01;
};

// One server step: Y' ~ mixture, eps ~ N(0,1), Adam on omega against the
// frozen client heads weighted by the mixture weights (heads[k] pairs with
// mixture.components[k]). Returns the loss before the step.
double generator_update(nn::GeneratorParams& gen, nn::AdamState& state,
                        std::span<const nn::LinearLayer* const> heads,
                        const GlobalMixture& mixture, const nn::ModelDims& dims,
                        const GeneratorUpdateOptions& options, Rng& rng);

}  // namespace fedload::kdgen
