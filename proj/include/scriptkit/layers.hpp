#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "scriptkit/rng.hpp"
#include "scriptkit/tensor.hpp"

// Composite layers with hand-written backward passes. Backward functions
// add parameter gradients into the parameters' gradient slots and return
// input gradients as plain tensors.
namespace scriptkit {

/// Uniform in [-1/sqrt(fan), 1/sqrt(fan)].
Tensor init_uniform(Shape shape, std::size_t fan, Rng& rng);

/// x (N, I) * w (I, O) + b (O).
Tensor affine(const Tensor& x, const Tensor& w, const Tensor* b);
/// Accumulates dW, db and (when dx is given) dx += dout * w^T.
void affine_backward(const Tensor& x, Tensor& w, Tensor* b, const Tensor& dout, Tensor* dx);

// ---------------------------------------------------------------------------
// Gated recurrent unit, one unidirectional layer, hidden size = input size:
//
//   z_t = sigmoid(x_t W_z + h_{t-1} U_z + b_z)
//   r_t = sigmoid(x_t W_r + h_{t-1} U_r + b_r)
//   n_t = tanh(x_t W_n + (r_t * h_{t-1}) U_n + b_n)
//   h_t = (1 - z_t) * n_t + z_t * h_{t-1}

struct GruParams {
  Tensor w_z, w_r, w_n;
  Tensor u_z, u_r, u_n;
  Tensor b_z, b_r, b_n;

  static GruParams init(std::size_t dim, Rng& rng);
  static GruParams zeros(std::size_t dim);
  std::size_t dim() const { return b_z.size(); }
  void register_params(ParamGroup& group, const std::string& prefix);
};

struct GruCache {
  Tensor x;
  std::vector<double> h0;
  Tensor h, z, r, n;
};

/// x (T, D) -> all hidden states (T, D). T may be 0.
Tensor gru_forward(const GruParams& p, const Tensor& x, GruCache* cache = nullptr);
Tensor gru_forward(const GruParams& p, const Tensor& x, const std::vector<double>& h0, GruCache* cache = nullptr);
/// Backward through time; returns dx. When dh0 is given it receives d/dh0.
Tensor gru_backward(GruParams& p, const GruCache& cache, const Tensor& dy, std::vector<double>* dh0 = nullptr);

// ---------------------------------------------------------------------------
// 2x1 convolution over a height-2 stack: x (2, L, D) -> (1, L, D),
//   y[0, l, o] = sum_i x[0, l, i] K[0, i, o] + x[1, l, i] K[1, i, o] + b[o].

struct Conv2x1Params {
  Tensor kernel;  // (2, D, D)
  Tensor bias;    // (D)

  static Conv2x1Params init(std::size_t dim, Rng& rng);
  static Conv2x1Params zeros(std::size_t dim);
  void register_params(ParamGroup& group, const std::string& prefix);
};

Tensor conv2x1_forward(const Conv2x1Params& p, const Tensor& x);
Tensor conv2x1_backward(Conv2x1Params& p, const Tensor& x, const Tensor& dy);

/// Mean over the leading (height) axis: (H, L, D) -> (L, D).
Tensor avg_pool_height(const Tensor& x);
Tensor avg_pool_height_backward(const Tensor& x, const Tensor& dy);

// ---------------------------------------------------------------------------
// Multi-head scaled dot-product cross-attention with learned projections:
//   Q = q_in W_q + b_q, K = kv W_k + b_k, V = kv W_v + b_v
//   head h: A_h = softmax(Q_h K_h^T / sqrt(D/H)), C_h = A_h V_h
//   out = [C_1 .. C_H] W_o + b_o  (+ q_in when residual)

struct CrossAttentionParams {
  Tensor w_q, w_k, w_v, w_o;
  Tensor b_q, b_k, b_v, b_o;
  std::size_t heads = 1;

  static CrossAttentionParams init(std::size_t dim, std::size_t heads, Rng& rng);
  static CrossAttentionParams identity(std::size_t dim, std::size_t heads);
  std::size_t dim() const { return b_q.size(); }
  void register_params(ParamGroup& group, const std::string& prefix);
};

struct CrossAttentionCache {
  Tensor q_in, kv_in;
  Tensor q, k, v;
  std::vector<Tensor> attn;  // per head (N, M)
  Tensor context;            // (N, D)
  bool residual = false;
};

/// q_in (N, D), kv_in (M, D) -> (N, D). Throws ShapeError on mismatched
/// widths, M == 0 with N > 0, or D not divisible by the head count.
Tensor cross_attention_forward(const CrossAttentionParams& p, const Tensor& q_in, const Tensor& kv_in, bool residual,
                               CrossAttentionCache* cache = nullptr);
/// Returns (dq_in, dkv_in).
std::pair<Tensor, Tensor> cross_attention_backward(CrossAttentionParams& p, const CrossAttentionCache& cache,
                                                   const Tensor& dy);

}  // namespace scriptkit
