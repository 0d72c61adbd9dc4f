#pragma once

#include <cstdint>

#include "fedload/common/random.hpp"
#include "fedload/nn/layers.hpp"

namespace fedload::nn {

/// Architecture hyper-parameters shared by the predictor and the generator.
struct ModelDims {
  std::size_t input_dim = 4;     // d: load, users, hour, weekday
  std::size_t lookback = 60;     // l
  std::size_t horizon = 30;      // s_max
  std::size_t hidden = 480;      // H
  std::size_t latent = 40;       // z_dim, width of the extractor output
  std::size_t noise = 32;        // generator noise width
  std::size_t gen_hidden = 256;  // generator hidden width

  static ModelDims paper() { return {}; }
  // small enough for one CPU; head and generator stay a few percent of theta
  static ModelDims toy() { return {4, 30, 30, 32, 4, 2, 4}; }

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// Load predictor: LSTM -> fc1 (feature extractor) -> head (regressor).
struct PredictorParams {
  LstmLayer lstm;
  LinearLayer fc1;
  LinearLayer head;

  static PredictorParams zeros(const ModelDims& dims);
  static PredictorParams init(const ModelDims& dims, Rng& rng);
  static PredictorParams zeros_like(const PredictorParams& other);

  std::int64_t param_count() const;
  std::int64_t head_param_count() const { return head.param_count(); }
  std::int64_t mac_count(std::size_t lookback) const;

  ParamBlocks blocks();
  ConstParamBlocks blocks() const;

  friend bool operator==(const PredictorParams&, const PredictorParams&) = default;
};

/// Latent feature generator: concat(label, noise) -> fc_in -> relu -> fc_out.
struct GeneratorParams {
  LinearLayer fc_in;
  LinearLayer fc_out;  // no bias

  static GeneratorParams zeros(const ModelDims& dims);
  static GeneratorParams init(const ModelDims& dims, Rng& rng);
  static GeneratorParams zeros_like(const GeneratorParams& other);

  std::int64_t param_count() const;
  std::int64_t mac_count() const;

  ParamBlocks blocks();
  ConstParamBlocks blocks() const;

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

// Head-only view used where the regressor travels on its own.
ParamBlocks head_blocks(LinearLayer& head);
ConstParamBlocks head_blocks(const LinearLayer& head);

struct PredictorCache {
  LstmLayer::Cache lstm;
  Tensor last_hidden;  // [B x H]
  Tensor latent;       // [B x z_dim]
};

struct PredictorOutput {
  Tensor latent;      // Z [B x z_dim]
  Tensor prediction;  // Y_hat [B x s_max]
};

PredictorOutput predictor_forward(const PredictorParams& model, const Tensor& x,
                                  PredictorCache* cache = nullptr);

// Accumulates into `grad`. `d_latent_extra`, when non-null, is added to the
// gradient flowing into Z from the head.
void predictor_backward(const PredictorParams& model, const PredictorCache& cache,
                        const Tensor& d_prediction, PredictorParams& grad,
                        const Tensor* d_latent_extra = nullptr);

struct GeneratorCache {
  Tensor input;   // concat(label, noise) [B x (s_max + noise)]
  Tensor hidden;  // post-relu [B x gen_hidden]
};

Tensor generator_forward(const GeneratorParams& gen, const Tensor& labels,
                         const Tensor& noise, GeneratorCache* cache = nullptr);

void generator_backward(const GeneratorParams& gen, const GeneratorCache& cache,
                        const Tensor& d_latent, GeneratorParams& grad);

template <class Model>
std::int64_t param_bytes(const Model& model, int bytes_per_param) {
  return model.param_count() * bytes_per_param;
}

inline std::int64_t param_bytes(const LinearLayer& layer, int bytes_per_param) {
  return layer.param_count() * bytes_per_param;
}

}  // namespace fedload::nn

namespace fedload::nn {

// L1(f(x), y) for the full predictor; accumulates parameter gradients into
// `grad` and returns the loss value.
double predictor_l1_loss(const PredictorParams& model, const Tensor& x, const Tensor& y,
                         PredictorParams& grad);

}  // namespace fedload::nn
