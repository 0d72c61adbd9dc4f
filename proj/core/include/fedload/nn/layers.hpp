#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedload/common/random.hpp"
#include "fedload/nn/tensor.hpp"

namespace fedload::nn {

template <class T>
struct NamedBlock {
  std::string name;
  T* tensor;
};
using ParamBlocks = std::vector<NamedBlock<Tensor>>;
using ConstParamBlocks = std::vector<NamedBlock<const Tensor>>;

/// Fully connected layer y = x W^T + b over a batch x [B x in].
struct LinearLayer {
  Tensor weight;               // [out x in]
  std::optional<Tensor> bias;  // [out]

  static LinearLayer zeros(std::size_t in, std::size_t out, bool with_bias);
  // U(-1/sqrt(in), 1/sqrt(in)) for weights and bias.
  static LinearLayer uniform(std::size_t in, std::size_t out, bool with_bias,
                             Rng& rng);

  std::size_t in_dim() const { return weight.dim(1); }
  std::size_t out_dim() const { return weight.dim(0); }
  std::int64_t param_count() const;
  std::int64_t mac_count() const;

  Tensor forward(const Tensor& x) const;
  // Accumulates parameter gradients into `grad` and returns dL/dx.
  Tensor backward(const Tensor& x, const Tensor& dy, LinearLayer& grad) const;
  // dL/dx only; parameters are treated as constants.
  Tensor backward_input(const Tensor& dy) const;
  // Accumulates parameter gradients only.
  void backward_params(const Tensor& x, const Tensor& dy, LinearLayer& grad) const;

  void append_blocks(const std::string& prefix, ParamBlocks& out);
  void append_blocks(const std::string& prefix, ConstParamBlocks& out) const;

  friend bool operator==(const LinearLayer&, const LinearLayer&) = default;
};

/// Single-layer LSTM with gates stacked in (input, forget, cell, output)
/// order and separate input/recurrent biases.
struct LstmLayer {
  Tensor w_input;      // [4H x d]
  Tensor w_recurrent;  // [4H x H]
  Tensor b_input;      // [4H]
  Tensor b_recurrent;  // [4H]

  struct Cache {
    Tensor input;   // [B x l x d]
    Tensor gates;   // [B x l x 4H], post-activation
    Tensor cells;   // [B x l x H]
    Tensor cell_tanh;
    Tensor hidden;  // [B x l x H]
  };

  static LstmLayer zeros(std::size_t input_dim, std::size_t hidden_dim);
  static LstmLayer uniform(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  std::size_t input_dim() const { return w_input.dim(1); }
  std::size_t hidden_dim() const { return w_recurrent.dim(1); }
  std::int64_t param_count() const;
  std::int64_t mac_count(std::size_t lookback) const;

  // seq [B x l x d] -> hidden states [B x l x H]. Fills `cache` when given.
  Tensor forward(const Tensor& seq, Cache* cache = nullptr) const;
  // Backpropagation through time. d_hidden [B x l x H] holds dL/dh_t for
  // every step. Accumulates into `grad` and returns dL/dseq.
  Tensor backward(const Cache& cache, const Tensor& d_hidden, LstmLayer& grad) const;

  void append_blocks(const std::string& prefix, ParamBlocks& out);
  void append_blocks(const std::string& prefix, ConstParamBlocks& out) const;

  friend bool operator==(const LstmLayer&, const LstmLayer&) = default;
};

}  // namespace fedload::nn
