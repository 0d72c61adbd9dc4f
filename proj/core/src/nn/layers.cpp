#include "fedload/nn/layers.hpp"

#include <cmath>

#include "fedload/common/error.hpp"

namespace fedload::nn {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void fill_uniform(Tensor& t, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values()) v = dist(rng);
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// acc[j] += sum_k x[k] * m[k * cols + j], with a 16-wide register tile over j.
void accumulate_rows(const double* m, const double* x, std::size_t rows, std::size_t cols,
                     double* acc) {
  constexpr std::size_t kTile = 16;
  std::size_t j0 = 0;
  for (; j0 + kTile <= cols; j0 += kTile) {
    double tile[kTile];
    for (std::size_t u = 0; u < kTile; ++u) tile[u] = acc[j0 + u];
    for (std::size_t k = 0; k < rows; ++k) {
      const double xk = x[k];
      const double* mr = m + k * cols + j0;
      for (std::size_t u = 0; u < kTile; ++u) tile[u] += xk * mr[u];
    }
    for (std::size_t u = 0; u < kTile; ++u) acc[j0 + u] = tile[u];
  }
  for (; j0 < cols; ++j0) {
    double s = acc[j0];
    for (std::size_t k = 0; k < rows; ++k) s += x[k] * m[k * cols + j0];
    acc[j0] = s;
  }
}

std::vector<double> transpose(const double* m, std::size_t rows, std::size_t cols) {
  std::vector<double> t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = m[r * cols + c];
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearLayer

LinearLayer LinearLayer::zeros(std::size_t in, std::size_t out, bool with_bias) {
  LinearLayer layer;
  layer.weight = Tensor({out, in});
  if (with_bias) layer.bias = Tensor({out});
  return layer;
}

LinearLayer LinearLayer::uniform(std::size_t in, std::size_t out, bool with_bias,
                                 Rng& rng) {
  LinearLayer layer = zeros(in, out, with_bias);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  fill_uniform(layer.weight, bound, rng);
  if (layer.bias) fill_uniform(*layer.bias, bound, rng);
  return layer;
}

std::int64_t LinearLayer::param_count() const {
  return static_cast<std::int64_t>(weight.size() + (bias ? bias->size() : 0));
}

std::int64_t LinearLayer::mac_count() const {
  return static_cast<std::int64_t>(in_dim() * out_dim());
}

Tensor LinearLayer::forward(const Tensor& x) const {
  const std::size_t in = in_dim(), out = out_dim();
  if (x.rank() != 2 || x.dim(1) != in) {
    throw ContractError("linear forward: expected [B x " + std::to_string(in) +
                        "], got " + shape_string(x.shape()));
  }
  const std::size_t batch = x.dim(0);
  Tensor y({batch, out});
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xr = x.data() + b * in;
    double* yr = y.data() + b * out;
    for (std::size_t o = 0; o < out; ++o) {
      yr[o] = (bias ? (*bias)[o] : 0.0) + dot(weight.data() + o * in, xr, in);
    }
  }
  return y;
}

void LinearLayer::backward_params(const Tensor& x, const Tensor& dy,
                                  LinearLayer& grad) const {
  const std::size_t in = in_dim(), out = out_dim();
  require_shape(dy, {x.dim(0), out}, "linear backward dy");
  for (std::size_t b = 0; b < x.dim(0); ++b) {
    const double* xr = x.data() + b * in;
    const double* dyr = dy.data() + b * out;
    for (std::size_t o = 0; o < out; ++o) {
      axpy(dyr[o], xr, grad.weight.data() + o * in, in);
      if (grad.bias) (*grad.bias)[o] += dyr[o];
    }
  }
}

Tensor LinearLayer::backward_input(const Tensor& dy) const {
  const std::size_t in = in_dim(), out = out_dim();
  require(dy.rank() == 2 && dy.dim(1) == out, "linear backward: dy width mismatch");
  Tensor dx({dy.dim(0), in});
  for (std::size_t b = 0; b < dy.dim(0); ++b) {
    const double* dyr = dy.data() + b * out;
    double* dxr = dx.data() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      axpy(dyr[o], weight.data() + o * in, dxr, in);
    }
  }
  return dx;
}

Tensor LinearLayer::backward(const Tensor& x, const Tensor& dy,
                             LinearLayer& grad) const {
  backward_params(x, dy, grad);
  return backward_input(dy);
}

void LinearLayer::append_blocks(const std::string& prefix, ParamBlocks& out) {
  out.push_back({prefix + ".weight", &weight});
  if (bias) out.push_back({prefix + ".bias", &*bias});
}

void LinearLayer::append_blocks(const std::string& prefix,
                                ConstParamBlocks& out) const {
  out.push_back({prefix + ".weight", &weight});
  if (bias) out.push_back({prefix + ".bias", &*bias});
}

// ---------------------------------------------------------------------------
// LstmLayer

LstmLayer LstmLayer::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  LstmLayer layer;
  layer.w_input = Tensor({4 * hidden_dim, input_dim});
  layer.w_recurrent = Tensor({4 * hidden_dim, hidden_dim});
  layer.b_input = Tensor({4 * hidden_dim});
  layer.b_recurrent = Tensor({4 * hidden_dim});
  return layer;
}

LstmLayer LstmLayer::uniform(std::size_t input_dim, std::size_t hidden_dim,
                             Rng& rng) {
  LstmLayer layer = zeros(input_dim, hidden_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  fill_uniform(layer.w_input, bound, rng);
  fill_uniform(layer.w_recurrent, bound, rng);
  fill_uniform(layer.b_input, bound, rng);
  fill_uniform(layer.b_recurrent, bound, rng);
  return layer;
}

std::int64_t LstmLayer::param_count() const {
  return static_cast<std::int64_t>(w_input.size() + w_recurrent.size() +
                                   b_input.size() + b_recurrent.size());
}

std::int64_t LstmLayer::mac_count(std::size_t lookback) const {
  const auto d = static_cast<std::int64_t>(input_dim());
  const auto h = static_cast<std::int64_t>(hidden_dim());
  return static_cast<std::int64_t>(lookback) * 4 * (d * h + h * h);
}

Tensor LstmLayer::forward(const Tensor& seq, Cache* cache) const {
  const std::size_t d = input_dim(), hd = hidden_dim(), g4 = 4 * hd;
  if (seq.rank() != 3 || seq.dim(2) != d || seq.dim(1) == 0) {
    throw ContractError("lstm forward: expected [B x l x " + std::to_string(d) +
                        "] with l >= 1, got " + shape_string(seq.shape()));
  }
  const std::size_t batch = seq.dim(0), steps = seq.dim(1);

  Tensor gates({batch, steps, g4});
  Tensor cells({batch, steps, hd});
  Tensor cell_tanh({batch, steps, hd});
  Tensor hidden({batch, steps, hd});
  std::vector<double> bias_sum(g4);
  for (std::size_t j = 0; j < g4; ++j) bias_sum[j] = b_input[j] + b_recurrent[j];
  // column-major copies so the gate pre-activations accumulate as contiguous axpys
  const std::vector<double> wi_t = transpose(w_input.data(), g4, d);
  const std::vector<double> wr_t = transpose(w_recurrent.data(), g4, hd);

  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t row = b * steps + t;
      const double* x = seq.data() + row * d;
      double* a = gates.data() + row * g4;
      std::copy(bias_sum.begin(), bias_sum.end(), a);
      accumulate_rows(wi_t.data(), x, d, g4, a);
      const double* c_prev = nullptr;
      if (t > 0) {
        const double* h_prev = hidden.data() + (row - 1) * hd;
        c_prev = cells.data() + (row - 1) * hd;
        accumulate_rows(wr_t.data(), h_prev, hd, g4, a);
      }
      double* c = cells.data() + row * hd;
      double* tc = cell_tanh.data() + row * hd;
      double* h = hidden.data() + row * hd;
      for (std::size_t k = 0; k < hd; ++k) {
        const double ig = sigmoid(a[k]);
        const double fg = sigmoid(a[hd + k]);
        const double gg = std::tanh(a[2 * hd + k]);
        const double og = sigmoid(a[3 * hd + k]);
        a[k] = ig;
        a[hd + k] = fg;
        a[2 * hd + k] = gg;
        a[3 * hd + k] = og;
        c[k] = ig * gg + (c_prev ? fg * c_prev[k] : 0.0);
        tc[k] = std::tanh(c[k]);
        h[k] = og * tc[k];
      }
    }
  }

  if (cache) {
    cache->input = seq;
    cache->gates = std::move(gates);
    cache->cells = std::move(cells);
    cache->cell_tanh = std::move(cell_tanh);
    cache->hidden = hidden;
  }
  return hidden;
}

Tensor LstmLayer::backward(const Cache& cache, const Tensor& d_hidden,
                           LstmLayer& grad) const {
  const std::size_t d = input_dim(), hd = hidden_dim(), g4 = 4 * hd;
  const std::size_t batch = cache.input.dim(0), steps = cache.input.dim(1);
  require_shape(d_hidden, {batch, steps, hd}, "lstm backward d_hidden");

  Tensor d_input({batch, steps, d});
  // gate gradients for every (b, t); weight gradients are reduced over them at the end
  std::vector<double> da_all(batch * steps * g4);
  std::vector<double> dh_next(hd), dc_next(hd);

  for (std::size_t b = 0; b < batch; ++b) {
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    std::fill(dc_next.begin(), dc_next.end(), 0.0);
    for (std::size_t step = steps; step-- > 0;) {
      const std::size_t row = b * steps + step;
      const double* a = cache.gates.data() + row * g4;
      const double* tc = cache.cell_tanh.data() + row * hd;
      const double* c_prev = step > 0 ? cache.cells.data() + (row - 1) * hd : nullptr;
      const double* upstream = d_hidden.data() + row * hd;
      double* da = da_all.data() + row * g4;

      for (std::size_t k = 0; k < hd; ++k) {
        const double ig = a[k], fg = a[hd + k], gg = a[2 * hd + k], og = a[3 * hd + k];
        const double dhk = upstream[k] + dh_next[k];
        const double dck = dc_next[k] + dhk * og * (1.0 - tc[k] * tc[k]);
        const double cp = c_prev ? c_prev[k] : 0.0;
        da[k] = dck * gg * ig * (1.0 - ig);
        da[hd + k] = dck * cp * fg * (1.0 - fg);
        da[2 * hd + k] = dck * ig * (1.0 - gg * gg);
        da[3 * hd + k] = dhk * tc[k] * og * (1.0 - og);
        dc_next[k] = dck * fg;
      }

      accumulate_rows(w_input.data(), da, g4, d, d_input.data() + row * d);
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      if (step > 0) accumulate_rows(w_recurrent.data(), da, g4, hd, dh_next.data());
    }
  }

  // dW_in[j,:] = sum_r da[r,j] x[r,:], dW_rec[j,:] = sum_{r, t>0} da[r,j] h[r-1,:]
  std::vector<double> col(batch * steps);
  std::vector<double> col_rec;
  std::vector<double> h_prev_rows;
  col_rec.reserve(batch * steps);
  h_prev_rows.reserve(batch * steps * hd);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 1; t < steps; ++t) {
      const double* h = cache.hidden.data() + (b * steps + t - 1) * hd;
      h_prev_rows.insert(h_prev_rows.end(), h, h + hd);
    }
  }
  const std::size_t rows = batch * steps;
  for (std::size_t j = 0; j < g4; ++j) {
    double bias = 0.0;
    col_rec.clear();
    for (std::size_t r = 0; r < rows; ++r) {
      col[r] = da_all[r * g4 + j];
      bias += col[r];
      if (r % steps != 0) col_rec.push_back(col[r]);
    }
    grad.b_input[j] += bias;
    grad.b_recurrent[j] += bias;
    accumulate_rows(cache.input.data(), col.data(), rows, d, grad.w_input.data() + j * d);
    accumulate_rows(h_prev_rows.data(), col_rec.data(), col_rec.size(), hd,
                    grad.w_recurrent.data() + j * hd);
  }
  return d_input;
}

void LstmLayer::append_blocks(const std::string& prefix, ParamBlocks& out) {
  out.push_back({prefix + ".w_input", &w_input});
  out.push_back({prefix + ".w_recurrent", &w_recurrent});
  out.push_back({prefix + ".b_input", &b_input});
  out.push_back({prefix + ".b_recurrent", &b_recurrent});
}

void LstmLayer::append_blocks(const std::string& prefix,
                              ConstParamBlocks& out) const {
  out.push_back({prefix + ".w_input", &w_input});
  out.push_back({prefix + ".w_recurrent", &w_recurrent});
  out.push_back({prefix + ".b_input", &b_input});
  out.push_back({prefix + ".b_recurrent", &b_recurrent});
}

}  // namespace fedload::nn
