#include "fedload/nn/models.hpp"

#include "fedload/common/error.hpp"

namespace fedload::nn {

PredictorParams PredictorParams::zeros(const ModelDims& dims) {
  return {LstmLayer::zeros(dims.input_dim, dims.hidden),
          LinearLayer::zeros(dims.hidden, dims.latent, true),
          LinearLayer::zeros(dims.latent, dims.horizon, true)};
}

PredictorParams PredictorParams::init(const ModelDims& dims, Rng& rng) {
  PredictorParams model;
  model.lstm = LstmLayer::uniform(dims.input_dim, dims.hidden, rng);
  model.fc1 = LinearLayer::uniform(dims.hidden, dims.latent, true, rng);
  model.head = LinearLayer::uniform(dims.latent, dims.horizon, true, rng);
  return model;
}

PredictorParams PredictorParams::zeros_like(const PredictorParams& other) {
  PredictorParams out = other;
  for (auto& b : out.blocks()) b.tensor->fill(0.0);
  return out;
}

std::int64_t PredictorParams::param_count() const {
  return lstm.param_count() + fc1.param_count() + head.param_count();
}

std::int64_t PredictorParams::mac_count(std::size_t lookback) const {
  return lstm.mac_count(lookback) + fc1.mac_count() + head.mac_count();
}

ParamBlocks PredictorParams::blocks() {
  ParamBlocks out;
  lstm.append_blocks("lstm", out);
  fc1.append_blocks("fc1", out);
  head.append_blocks("head", out);
  return out;
}

ConstParamBlocks PredictorParams::blocks() const {
  ConstParamBlocks out;
  lstm.append_blocks("lstm", out);
  fc1.append_blocks("fc1", out);
  head.append_blocks("head", out);
  return out;
}

GeneratorParams GeneratorParams::zeros(const ModelDims& dims) {
  return {LinearLayer::zeros(dims.horizon + dims.noise, dims.gen_hidden, true),
          LinearLayer::zeros(dims.gen_hidden, dims.latent, false)};
}

GeneratorParams GeneratorParams::init(const ModelDims& dims, Rng& rng) {
  GeneratorParams gen;
  gen.fc_in = LinearLayer::uniform(dims.horizon + dims.noise, dims.gen_hidden, true, rng);
  gen.fc_out = LinearLayer::uniform(dims.gen_hidden, dims.latent, false, rng);
  return gen;
}

GeneratorParams GeneratorParams::zeros_like(const GeneratorParams& other) {
  GeneratorParams out = other;
  for (auto& b : out.blocks()) b.tensor->fill(0.0);
  return out;
}

std::int64_t GeneratorParams::param_count() const {
  return fc_in.param_count() + fc_out.param_count();
}

std::int64_t GeneratorParams::mac_count() const {
  return fc_in.mac_count() + fc_out.mac_count();
}

ParamBlocks GeneratorParams::blocks() {
  ParamBlocks out;
  fc_in.append_blocks("gen.fc_in", out);
  fc_out.append_blocks("gen.fc_out", out);
  return out;
}

ConstParamBlocks GeneratorParams::blocks() const {
  ConstParamBlocks out;
  fc_in.append_blocks("gen.fc_in", out);
  fc_out.append_blocks("gen.fc_out", out);
  return out;
}

ParamBlocks head_blocks(LinearLayer& head) {
  ParamBlocks out;
  head.append_blocks("head", out);
  return out;
}

ConstParamBlocks head_blocks(const LinearLayer& head) {
  ConstParamBlocks out;
  head.append_blocks("head", out);
  return out;
}

PredictorOutput predictor_forward(const PredictorParams& model, const Tensor& x,
                                  PredictorCache* cache) {
  if (!x.all_finite()) throw ContractError("predictor forward: non-finite input");
  LstmLayer::Cache local;
  LstmLayer::Cache& lstm_cache = cache ? cache->lstm : local;
  const Tensor hidden = model.lstm.forward(x, &lstm_cache);

  const std::size_t batch = x.dim(0), steps = x.dim(1), hd = model.lstm.hidden_dim();
  Tensor last({batch, hd});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t k = 0; k < hd; ++k) last.at(b, k) = hidden.at(b, steps - 1, k);
  }
  PredictorOutput out;
  out.latent = model.fc1.forward(last);
  out.prediction = model.head.forward(out.latent);
  if (cache) {
    cache->last_hidden = std::move(last);
    cache->latent = out.latent;
  }
  return out;
}

void predictor_backward(const PredictorParams& model, const PredictorCache& cache,
                        const Tensor& d_prediction, PredictorParams& grad,
                        const Tensor* d_latent_extra) {
  Tensor d_latent = model.head.backward(cache.latent, d_prediction, grad.head);
  if (d_latent_extra) d_latent += *d_latent_extra;
  const Tensor d_last = model.fc1.backward(cache.last_hidden, d_latent, grad.fc1);

  const std::size_t batch = cache.lstm.input.dim(0), steps = cache.lstm.input.dim(1);
  const std::size_t hd = model.lstm.hidden_dim();
  Tensor d_hidden({batch, steps, hd});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t k = 0; k < hd; ++k) d_hidden.at(b, steps - 1, k) = d_last.at(b, k);
  }
  model.lstm.backward(cache.lstm, d_hidden, grad.lstm);
}

Tensor generator_forward(const GeneratorParams& gen, const Tensor& labels,
                         const Tensor& noise, GeneratorCache* cache) {
  if (labels.rank() != 2 || noise.rank() != 2 || labels.dim(0) != noise.dim(0) ||
      labels.dim(1) + noise.dim(1) != gen.fc_in.in_dim()) {
    throw ContractError("generator forward: labels " + shape_string(labels.shape()) +
                        " and noise " + shape_string(noise.shape()) +
                        " do not concatenate to width " +
                        std::to_string(gen.fc_in.in_dim()));
  }
  const std::size_t batch = labels.dim(0), ly = labels.dim(1), ln = noise.dim(1);
  Tensor input({batch, ly + ln});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < ly; ++j) input.at(b, j) = labels.at(b, j);
    for (std::size_t j = 0; j < ln; ++j) input.at(b, ly + j) = noise.at(b, j);
  }
  Tensor hidden = gen.fc_in.forward(input);
  for (double& v : hidden.values()) v = v > 0.0 ? v : 0.0;
  Tensor latent = gen.fc_out.forward(hidden);
  if (cache) {
    cache->input = std::move(input);
    cache->hidden = std::move(hidden);
  }
  return latent;
}

void generator_backward(const GeneratorParams& gen, const GeneratorCache& cache,
                        const Tensor& d_latent, GeneratorParams& grad) {
  Tensor d_hidden = gen.fc_out.backward(cache.hidden, d_latent, grad.fc_out);
  for (std::size_t i = 0; i < d_hidden.size(); ++i) {
    if (cache.hidden[i] <= 0.0) d_hidden[i] = 0.0;
  }
  gen.fc_in.backward_params(cache.input, d_hidden, grad.fc_in);
}

}  // namespace fedload::nn

#include "fedload/nn/loss.hpp"

namespace fedload::nn {

double predictor_l1_loss(const PredictorParams& model, const Tensor& x, const Tensor& y,
                         PredictorParams& grad) {
  PredictorCache cache;
  const PredictorOutput out = predictor_forward(model, x, &cache);
  const LossResult loss = l1_loss(out.prediction, y);
  predictor_backward(model, cache, loss.grad, grad);
  return loss.value;
}

}  // namespace fedload::nn
