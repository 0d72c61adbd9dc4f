#include "fedload/kdgen/distill.hpp"

#include "fedload/common/error.hpp"
#include "fedload/nn/loss.hpp"

namespace fedload::kdgen {

SyntheticBatch draw_synthetic_batch(const nn::GeneratorParams& gen, const nn::ModelDims& dims,
                                    std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> uniform(1.0, 2.0);
  std::normal_distribution<double> standard(0.0, 1.0);
  nn::Tensor labels({n, dims.horizon});
  for (double& v : labels.values()) v = uniform(rng);
  nn::Tensor noise({n, dims.noise});
  for (double& v : noise.values()) v = standard(rng);
  return {nn::generator_forward(gen, labels, noise), std::move(labels)};
}

KdLoss kd_local_loss(const nn::PredictorParams& model, const nn::Tensor& x,
                     const nn::Tensor& y, const SyntheticBatch* synthetic, double lambda,
                     nn::PredictorParams& grad) {
  KdLoss out;
  out.real = nn::predictor_l1_loss(model, x, y, grad);
  out.total = out.real;
  if (synthetic == nullptr || lambda == 0.0) return out;

  const nn::Tensor pred = model.head.forward(synthetic->latent);
  nn::LossResult syn = nn::l1_loss(pred, synthetic->labels);
  syn.grad *= lambda;
  model.head.backward_params(synthetic->latent, syn.grad, grad.head);
  out.synthetic = syn.value;
  out.total += lambda * syn.value;
  return out;
}

double generator_loss(const nn::GeneratorParams& gen,
                      std::span<const nn::LinearLayer* const> heads,
                      std::span<const double> weights, const nn::Tensor& labels,
                      const nn::Tensor& noise, nn::GeneratorParams* grad) {
  require(!heads.empty(), "generator_loss: no client heads");
  require(heads.size() == weights.size(), "generator_loss: one weight per head required");
  nn::GeneratorCache cache;
  const nn::Tensor latent = nn::generator_forward(gen, labels, noise, &cache);
  const double scale = 1.0 / static_cast<double>(heads.size());

  double loss = 0.0;
  nn::Tensor d_latent = nn::Tensor::zeros_like(latent);
  for (std::size_t k = 0; k < heads.size(); ++k) {
    const nn::Tensor pred = heads[k]->forward(latent);
    nn::LossResult l = nn::l1_loss(pred, labels);
    const double w = scale * weights[k];
    loss += w * l.value;
    if (grad) {
      l.grad *= w;
      d_latent += heads[k]->backward_input(l.grad);
    }
  }
  if (grad) nn::generator_backward(gen, cache, d_latent, *grad);
  return loss;
}

double generator_update(nn::GeneratorParams& gen, nn::AdamState& state,
                        std::span<const nn::LinearLayer* const> heads,
                        const GlobalMixture& mixture, const nn::ModelDims& dims,
                        const GeneratorUpdateOptions& options, Rng& rng) {
  require(!heads.empty(), "generator_update: no client heads");
  require(heads.size() == mixture.components.size(),
          "generator_update: heads and mixture components differ in count");
  const nn::Tensor labels = sample_mixture(mixture, options.batch, dims.horizon, rng);
  std::normal_distribution<double> standard(0.0, 1.0);
  nn::Tensor noise({options.batch, dims.noise});
  for (double& v : noise.values()) v = standard(rng);

  std::vector<double> weights;
  for (const auto& c : mixture.components) weights.push_back(c.weight);
  nn::GeneratorParams grad = nn::GeneratorParams::zeros_like(gen);
  const double loss = generator_loss(gen, heads, weights, labels, noise, &grad);
  nn::adam_step(gen, grad, state, options.learning_rate);
  return loss;
}

}  // namespace fedload::kdgen
