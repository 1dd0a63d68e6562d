#include "scriptkit/layers.hpp"

#include <cmath>

#include "scriptkit/error.hpp"
#include "scriptkit/ops.hpp"

namespace scriptkit {

Tensor init_uniform(Shape shape, std::size_t fan, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan == 0 ? 1 : fan));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor* b) {
  if (x.cols() != w.rows()) {
    throw ShapeError("affine: shape mismatch " + shape_string(x.shape()) + " x " + shape_string(w.shape()));
  }
  const std::size_t n = x.rows();
  const std::size_t in = w.rows();
  const std::size_t out_dim = w.cols();
  Tensor out = Tensor::matrix(n, out_dim);
  for (std::size_t r = 0; r < n; ++r) {
    auto o = out.row(r);
    if (b) {
      for (std::size_t j = 0; j < out_dim; ++j) o[j] = (*b)[j];
    }
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x.at(r, i);
      if (xi == 0.0) continue;
      const double* wrow = &w.values()[i * out_dim];
      for (std::size_t j = 0; j < out_dim; ++j) o[j] += xi * wrow[j];
    }
  }
  return out;
}

void affine_backward(const Tensor& x, Tensor& w, Tensor* b, const Tensor& dout, Tensor* dx) {
  const std::size_t n = x.rows();
  const std::size_t in = w.rows();
  const std::size_t out_dim = w.cols();
  auto gw = w.grad();
  std::span<double> gb;
  if (b) gb = b->grad();
  for (std::size_t r = 0; r < n; ++r) {
    auto d = dout.row(r);
    if (b) {
      for (std::size_t j = 0; j < out_dim; ++j) gb[j] += d[j];
    }
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x.at(r, i);
      const double* wrow = &w.values()[i * out_dim];
      double* grow = &gw[i * out_dim];
      double acc = 0.0;
      for (std::size_t j = 0; j < out_dim; ++j) {
        grow[j] += xi * d[j];
        acc += d[j] * wrow[j];
      }
      if (dx) dx->at(r, i) += acc;
    }
  }
}

// ---------------------------------------------------------------------------
// GRU

GruParams GruParams::init(std::size_t dim, Rng& rng) {
  GruParams p;
  for (Tensor* w : {&p.w_z, &p.w_r, &p.w_n, &p.u_z, &p.u_r, &p.u_n}) *w = init_uniform({dim, dim}, dim, rng);
  for (Tensor* b : {&p.b_z, &p.b_r, &p.b_n}) *b = init_uniform({dim}, dim, rng);
  return p;
}

GruParams GruParams::zeros(std::size_t dim) {
  GruParams p;
  for (Tensor* w : {&p.w_z, &p.w_r, &p.w_n, &p.u_z, &p.u_r, &p.u_n}) *w = Tensor({dim, dim});
  for (Tensor* b : {&p.b_z, &p.b_r, &p.b_n}) *b = Tensor({dim});
  return p;
}

void GruParams::register_params(ParamGroup& group, const std::string& prefix) {
  group.add(prefix + ".w_z", w_z);
  group.add(prefix + ".w_r", w_r);
  group.add(prefix + ".w_n", w_n);
  group.add(prefix + ".u_z", u_z);
  group.add(prefix + ".u_r", u_r);
  group.add(prefix + ".u_n", u_n);
  group.add(prefix + ".b_z", b_z);
  group.add(prefix + ".b_r", b_r);
  group.add(prefix + ".b_n", b_n);
}

Tensor gru_forward(const GruParams& p, const Tensor& x, GruCache* cache) {
  return gru_forward(p, x, std::vector<double>(p.dim(), 0.0), cache);
}

Tensor gru_forward(const GruParams& p, const Tensor& x, const std::vector<double>& h0, GruCache* cache) {
  const std::size_t d = p.dim();
  require_rank(x, 2, "gru");
  if (x.cols() != d || h0.size() != d) {
    throw ShapeError("gru: input " + shape_string(x.shape()) + " does not match hidden size " + std::to_string(d));
  }
  const std::size_t steps = x.rows();
  // Input projections for all steps at once.
  const Tensor xz = affine(x, p.w_z, &p.b_z);
  const Tensor xr = affine(x, p.w_r, &p.b_r);
  const Tensor xn = affine(x, p.w_n, &p.b_n);

  Tensor h = Tensor::matrix(steps, d);
  Tensor z = Tensor::matrix(steps, d);
  Tensor r = Tensor::matrix(steps, d);
  Tensor n = Tensor::matrix(steps, d);
  std::vector<double> prev = h0;
  std::vector<double> rh(d);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      double az = xz.at(t, j);
      double ar = xr.at(t, j);
      for (std::size_t i = 0; i < d; ++i) {
        az += prev[i] * p.u_z.at(i, j);
        ar += prev[i] * p.u_r.at(i, j);
      }
      z.at(t, j) = ops::sigmoid(az);
      r.at(t, j) = ops::sigmoid(ar);
    }
    for (std::size_t i = 0; i < d; ++i) rh[i] = r.at(t, i) * prev[i];
    for (std::size_t j = 0; j < d; ++j) {
      double an = xn.at(t, j);
      for (std::size_t i = 0; i < d; ++i) an += rh[i] * p.u_n.at(i, j);
      n.at(t, j) = std::tanh(an);
    }
    for (std::size_t j = 0; j < d; ++j) {
      h.at(t, j) = (1.0 - z.at(t, j)) * n.at(t, j) + z.at(t, j) * prev[j];
      prev[j] = h.at(t, j);
    }
  }
  if (cache) {
    cache->x = x;
    cache->x.clear_grad();
    cache->h0 = h0;
    cache->h = h;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->n = std::move(n);
  }
  return h;
}

Tensor gru_backward(GruParams& p, const GruCache& cache, const Tensor& dy, std::vector<double>* dh0) {
  const std::size_t d = p.dim();
  const std::size_t steps = cache.x.rows();
  require_same_shape(cache.h, dy, "gru_backward");
  Tensor da_z = Tensor::matrix(steps, d);
  Tensor da_r = Tensor::matrix(steps, d);
  Tensor da_n = Tensor::matrix(steps, d);
  // Hidden-state inputs of each step: h_{t-1} and r_t * h_{t-1}.
  Tensor prev_h = Tensor::matrix(steps, d);
  Tensor prev_rh = Tensor::matrix(steps, d);

  auto gu_z = p.u_z.grad();
  auto gu_r = p.u_r.grad();
  auto gu_n = p.u_n.grad();
  std::vector<double> carry(d, 0.0);
  std::vector<double> dprev(d);
  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t j = 0; j < d; ++j) {
      prev_h.at(t, j) = t == 0 ? cache.h0[j] : cache.h.at(t - 1, j);
      prev_rh.at(t, j) = cache.r.at(t, j) * prev_h.at(t, j);
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double dh = dy.at(t, j) + carry[j];
      const double zt = cache.z.at(t, j);
      const double nt = cache.n.at(t, j);
      da_n.at(t, j) = dh * (1.0 - zt) * (1.0 - nt * nt);
      da_z.at(t, j) = dh * (prev_h.at(t, j) - nt) * zt * (1.0 - zt);
      dprev[j] = dh * zt;
    }
    // d(r * h_prev) = da_n U_n^T
    for (std::size_t i = 0; i < d; ++i) {
      double drh = 0.0;
      for (std::size_t j = 0; j < d; ++j) drh += da_n.at(t, j) * p.u_n.at(i, j);
      const double rt = cache.r.at(t, i);
      dprev[i] += drh * rt;
      da_r.at(t, i) = drh * prev_h.at(t, i) * rt * (1.0 - rt);
    }
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        acc += da_z.at(t, j) * p.u_z.at(i, j) + da_r.at(t, j) * p.u_r.at(i, j);
        gu_z[i * d + j] += prev_h.at(t, i) * da_z.at(t, j);
        gu_r[i * d + j] += prev_h.at(t, i) * da_r.at(t, j);
        gu_n[i * d + j] += prev_rh.at(t, i) * da_n.at(t, j);
      }
      dprev[i] += acc;
    }
    carry = dprev;
  }
  if (dh0) *dh0 = carry;

  Tensor dx = Tensor::matrix(steps, d);
  affine_backward(cache.x, p.w_z, &p.b_z, da_z, &dx);
  affine_backward(cache.x, p.w_r, &p.b_r, da_r, &dx);
  affine_backward(cache.x, p.w_n, &p.b_n, da_n, &dx);
  return dx;
}

// ---------------------------------------------------------------------------
// Conv 2x1

Conv2x1Params Conv2x1Params::init(std::size_t dim, Rng& rng) {
  return {init_uniform({2, dim, dim}, 2 * dim, rng), init_uniform({dim}, 2 * dim, rng)};
}

Conv2x1Params Conv2x1Params::zeros(std::size_t dim) { return {Tensor({2, dim, dim}), Tensor({dim})}; }

void Conv2x1Params::register_params(ParamGroup& group, const std::string& prefix) {
  group.add(prefix + ".kernel", kernel);
  group.add(prefix + ".bias", bias);
}

Tensor conv2x1_forward(const Conv2x1Params& p, const Tensor& x) {
  require_rank(x, 3, "conv2x1");
  if (x.dim(0) != 2) throw ShapeError("conv2x1: input height must be 2, got shape " + shape_string(x.shape()));
  const std::size_t len = x.dim(1);
  const std::size_t d = x.dim(2);
  if (p.kernel.dim(1) != d) {
    throw ShapeError("conv2x1: input " + shape_string(x.shape()) + " does not match kernel " +
                     shape_string(p.kernel.shape()));
  }
  const std::size_t out_dim = p.kernel.dim(2);
  Tensor y({1, len, out_dim});
  const auto xv = x.values();
  const auto kv = p.kernel.values();
  auto yv = y.values();
  for (std::size_t l = 0; l < len; ++l) {
    for (std::size_t o = 0; o < out_dim; ++o) yv[l * out_dim + o] = p.bias[o];
    for (std::size_t hgt = 0; hgt < 2; ++hgt) {
      for (std::size_t i = 0; i < d; ++i) {
        const double xi = xv[(hgt * len + l) * d + i];
        const double* krow = &kv[(hgt * d + i) * out_dim];
        for (std::size_t o = 0; o < out_dim; ++o) yv[l * out_dim + o] += xi * krow[o];
      }
    }
  }
  return y;
}

Tensor conv2x1_backward(Conv2x1Params& p, const Tensor& x, const Tensor& dy) {
  const std::size_t len = x.dim(1);
  const std::size_t d = x.dim(2);
  const std::size_t out_dim = p.kernel.dim(2);
  if (dy.rank() != 3 || dy.dim(0) != 1 || dy.dim(1) != len || dy.dim(2) != out_dim) {
    throw ShapeError("conv2x1_backward: gradient shape " + shape_string(dy.shape()));
  }
  Tensor dx(x.shape());
  auto gk = p.kernel.grad();
  auto gb = p.bias.grad();
  const auto xv = x.values();
  const auto kv = p.kernel.values();
  const auto dyv = dy.values();
  auto dxv = dx.values();
  for (std::size_t l = 0; l < len; ++l) {
    const double* drow = &dyv[l * out_dim];
    for (std::size_t o = 0; o < out_dim; ++o) gb[o] += drow[o];
    for (std::size_t hgt = 0; hgt < 2; ++hgt) {
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t xi = (hgt * len + l) * d + i;
        const std::size_t krow = (hgt * d + i) * out_dim;
        double acc = 0.0;
        for (std::size_t o = 0; o < out_dim; ++o) {
          gk[krow + o] += xv[xi] * drow[o];
          acc += drow[o] * kv[krow + o];
        }
        dxv[xi] += acc;
      }
    }
  }
  return dx;
}

Tensor avg_pool_height(const Tensor& x) {
  require_rank(x, 3, "avg_pool_height");
  const std::size_t height = x.dim(0);
  const std::size_t len = x.dim(1);
  const std::size_t d = x.dim(2);
  if (height == 0) throw ShapeError("avg_pool_height: empty height");
  Tensor y = Tensor::matrix(len, d);
  const double scale = 1.0 / static_cast<double>(height);
  for (std::size_t hgt = 0; hgt < height; ++hgt) {
    for (std::size_t k = 0; k < len * d; ++k) y[k] += x[hgt * len * d + k] * scale;
  }
  return y;
}

Tensor avg_pool_height_backward(const Tensor& x, const Tensor& dy) {
  const std::size_t height = x.dim(0);
  const std::size_t plane = x.dim(1) * x.dim(2);
  Tensor dx(x.shape());
  const double scale = 1.0 / static_cast<double>(height);
  for (std::size_t hgt = 0; hgt < height; ++hgt) {
    for (std::size_t k = 0; k < plane; ++k) dx[hgt * plane + k] = dy[k] * scale;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Cross-attention

CrossAttentionParams CrossAttentionParams::init(std::size_t dim, std::size_t heads, Rng& rng) {
  CrossAttentionParams p;
  for (Tensor* w : {&p.w_q, &p.w_k, &p.w_v, &p.w_o}) *w = init_uniform({dim, dim}, dim, rng);
  for (Tensor* b : {&p.b_q, &p.b_k, &p.b_v, &p.b_o}) *b = init_uniform({dim}, dim, rng);
  p.heads = heads;
  return p;
}

CrossAttentionParams CrossAttentionParams::identity(std::size_t dim, std::size_t heads) {
  CrossAttentionParams p;
  for (Tensor* w : {&p.w_q, &p.w_k, &p.w_v, &p.w_o}) {
    *w = Tensor({dim, dim});
    for (std::size_t i = 0; i < dim; ++i) w->at(i, i) = 1.0;
  }
  for (Tensor* b : {&p.b_q, &p.b_k, &p.b_v, &p.b_o}) *b = Tensor({dim});
  p.heads = heads;
  return p;
}

void CrossAttentionParams::register_params(ParamGroup& group, const std::string& prefix) {
  group.add(prefix + ".w_q", w_q);
  group.add(prefix + ".w_k", w_k);
  group.add(prefix + ".w_v", w_v);
  group.add(prefix + ".w_o", w_o);
  group.add(prefix + ".b_q", b_q);
  group.add(prefix + ".b_k", b_k);
  group.add(prefix + ".b_v", b_v);
  group.add(prefix + ".b_o", b_o);
}

Tensor cross_attention_forward(const CrossAttentionParams& p, const Tensor& q_in, const Tensor& kv_in, bool residual,
                               CrossAttentionCache* cache) {
  const std::size_t d = p.dim();
  require_rank(q_in, 2, "cross_attention");
  require_rank(kv_in, 2, "cross_attention");
  if (q_in.cols() != d || kv_in.cols() != d) {
    throw ShapeError("cross_attention: query " + shape_string(q_in.shape()) + " and key/value " +
                     shape_string(kv_in.shape()) + " must both have width " + std::to_string(d));
  }
  if (p.heads == 0 || d % p.heads != 0) {
    throw ShapeError("cross_attention: width " + std::to_string(d) + " is not divisible by " +
                     std::to_string(p.heads) + " heads");
  }
  const std::size_t n = q_in.rows();
  const std::size_t m = kv_in.rows();
  if (m == 0 && n > 0) throw ShapeError("cross_attention: no key/value rows");
  const std::size_t hd = d / p.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  Tensor q = affine(q_in, p.w_q, &p.b_q);
  Tensor k = affine(kv_in, p.w_k, &p.b_k);
  Tensor v = affine(kv_in, p.w_v, &p.b_v);
  Tensor context = Tensor::matrix(n, d);
  std::vector<Tensor> attn;
  attn.reserve(p.heads);
  for (std::size_t h = 0; h < p.heads; ++h) {
    Tensor logits = Tensor::matrix(n, m);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        double dot = 0.0;
        for (std::size_t c = h * hd; c < (h + 1) * hd; ++c) dot += q.at(a, c) * k.at(b, c);
        logits.at(a, b) = dot * scale;
      }
    }
    Tensor weights = m == 0 ? logits : ops::softmax(logits, 1);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        const double w = weights.at(a, b);
        for (std::size_t c = h * hd; c < (h + 1) * hd; ++c) context.at(a, c) += w * v.at(b, c);
      }
    }
    attn.push_back(std::move(weights));
  }
  Tensor out = affine(context, p.w_o, &p.b_o);
  if (residual) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += q_in[i];
  }
  if (cache) {
    cache->q_in = q_in;
    cache->kv_in = kv_in;
    cache->q_in.clear_grad();
    cache->kv_in.clear_grad();
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->attn = std::move(attn);
    cache->context = std::move(context);
    cache->residual = residual;
  }
  return out;
}

std::pair<Tensor, Tensor> cross_attention_backward(CrossAttentionParams& p, const CrossAttentionCache& cache,
                                                   const Tensor& dy) {
  const std::size_t d = p.dim();
  const std::size_t n = cache.q_in.rows();
  const std::size_t m = cache.kv_in.rows();
  const std::size_t hd = d / p.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  Tensor dcontext = Tensor::matrix(n, d);
  affine_backward(cache.context, p.w_o, &p.b_o, dy, &dcontext);

  Tensor dq = Tensor::matrix(n, d);
  Tensor dk = Tensor::matrix(m, d);
  Tensor dv = Tensor::matrix(m, d);
  for (std::size_t h = 0; h < p.heads; ++h) {
    const Tensor& w = cache.attn[h];
    Tensor dw = Tensor::matrix(n, m);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        double acc = 0.0;
        for (std::size_t c = h * hd; c < (h + 1) * hd; ++c) {
          acc += dcontext.at(a, c) * cache.v.at(b, c);
          dv.at(b, c) += w.at(a, b) * dcontext.at(a, c);
        }
        dw.at(a, b) = acc;
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      double dot = 0.0;
      for (std::size_t b = 0; b < m; ++b) dot += dw.at(a, b) * w.at(a, b);
      for (std::size_t b = 0; b < m; ++b) {
        const double dlogit = w.at(a, b) * (dw.at(a, b) - dot) * scale;
        for (std::size_t c = h * hd; c < (h + 1) * hd; ++c) {
          dq.at(a, c) += dlogit * cache.k.at(b, c);
          dk.at(b, c) += dlogit * cache.q.at(a, c);
        }
      }
    }
  }
  Tensor dq_in = Tensor::matrix(n, d);
  Tensor dkv_in = Tensor::matrix(m, d);
  affine_backward(cache.q_in, p.w_q, &p.b_q, dq, &dq_in);
  affine_backward(cache.kv_in, p.w_k, &p.b_k, dk, &dkv_in);
  affine_backward(cache.kv_in, p.w_v, &p.b_v, dv, &dkv_in);
  if (cache.residual) {
    for (std::size_t i = 0; i < dq_in.size(); ++i) dq_in[i] += dy[i];
  }
  return {std::move(dq_in), std::move(dkv_in)};
}

}  // namespace scriptkit
