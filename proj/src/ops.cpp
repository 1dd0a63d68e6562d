#include "scriptkit/ops.hpp"

#include <algorithm>
#include <cmath>

#include "scriptkit/error.hpp"

namespace scriptkit::ops {

namespace {

void require_axis(std::size_t axis, std::string_view op) {
  if (axis > 1) throw ShapeError(std::string(op) + ": axis must be 0 or 1");
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shape mismatch " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  Tensor out = Tensor::matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

void matmul_backward(Tensor& a, Tensor& b, const Tensor& dout) {
  if (dout.rows() != a.rows() || dout.cols() != b.cols()) {
    throw ShapeError("matmul_backward: gradient shape " + shape_string(dout.shape()) + " does not match output");
  }
  auto ga = a.grad();
  auto gb = b.grad();
  const std::size_t n = a.cols();
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        acc += dout.at(i, j) * b.at(k, j);
        gb[k * m + j] += a.at(i, k) * dout.at(i, j);
      }
      ga[i * n + k] += acc;
    }
  }
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  out.clear_grad();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

void add_backward(Tensor& a, Tensor& b, const Tensor& dout) {
  require_same_shape(a, dout, "add_backward");
  auto ga = a.grad();
  auto gb = b.grad();
  for (std::size_t i = 0; i < dout.size(); ++i) {
    ga[i] += dout[i];
    gb[i] += dout[i];
  }
}

Tensor sigmoid(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

void sigmoid_backward(Tensor& x, const Tensor& y, const Tensor& dout) {
  require_same_shape(x, dout, "sigmoid_backward");
  auto g = x.grad();
  for (std::size_t i = 0; i < x.size(); ++i) g[i] += dout[i] * y[i] * (1.0 - y[i]);
}

Tensor tanh(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

void tanh_backward(Tensor& x, const Tensor& y, const Tensor& dout) {
  require_same_shape(x, dout, "tanh_backward");
  auto g = x.grad();
  for (std::size_t i = 0; i < x.size(); ++i) g[i] += dout[i] * (1.0 - y[i] * y[i]);
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  require_rank(x, 2, "softmax");
  require_axis(axis, "softmax");
  Tensor out(x.shape());
  const std::size_t lines = axis == 1 ? x.rows() : x.cols();
  const std::size_t len = axis == 1 ? x.cols() : x.rows();
  auto idx = [&](std::size_t line, std::size_t k) { return axis == 1 ? line * x.cols() + k : k * x.cols() + line; };
  for (std::size_t line = 0; line < lines; ++line) {
    double peak = -INFINITY;
    for (std::size_t k = 0; k < len; ++k) peak = std::max(peak, x[idx(line, k)]);
    double total = 0.0;
    for (std::size_t k = 0; k < len; ++k) total += out[idx(line, k)] = std::exp(x[idx(line, k)] - peak);
    for (std::size_t k = 0; k < len; ++k) out[idx(line, k)] /= total;
  }
  return out;
}

void softmax_backward(Tensor& x, const Tensor& y, const Tensor& dout, std::size_t axis) {
  require_same_shape(x, dout, "softmax_backward");
  require_axis(axis, "softmax_backward");
  auto g = x.grad();
  const std::size_t lines = axis == 1 ? x.rows() : x.cols();
  const std::size_t len = axis == 1 ? x.cols() : x.rows();
  auto idx = [&](std::size_t line, std::size_t k) { return axis == 1 ? line * x.cols() + k : k * x.cols() + line; };
  for (std::size_t line = 0; line < lines; ++line) {
    double dot = 0.0;
    for (std::size_t k = 0; k < len; ++k) dot += dout[idx(line, k)] * y[idx(line, k)];
    for (std::size_t k = 0; k < len; ++k) g[idx(line, k)] += y[idx(line, k)] * (dout[idx(line, k)] - dot);
  }
}

Tensor concat(const std::vector<const Tensor*>& parts, std::size_t axis) {
  require_axis(axis, "concat");
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Tensor& first = *parts.front();
  require_rank(first, 2, "concat");
  std::size_t extent = 0;
  for (const Tensor* p : parts) {
    require_rank(*p, 2, "concat");
    if (p->dim(1 - axis) != first.dim(1 - axis)) {
      throw ShapeError("concat: shape mismatch " + shape_string(first.shape()) + " vs " + shape_string(p->shape()));
    }
    extent += p->dim(axis);
  }
  Tensor out = axis == 0 ? Tensor::matrix(extent, first.cols()) : Tensor::matrix(first.rows(), extent);
  std::size_t offset = 0;
  for (const Tensor* p : parts) {
    for (std::size_t r = 0; r < p->rows(); ++r) {
      for (std::size_t c = 0; c < p->cols(); ++c) {
        if (axis == 0) {
          out.at(offset + r, c) = p->at(r, c);
        } else {
          out.at(r, offset + c) = p->at(r, c);
        }
      }
    }
    offset += p->dim(axis);
  }
  return out;
}

void concat_backward(const std::vector<Tensor*>& parts, const Tensor& dout, std::size_t axis) {
  require_axis(axis, "concat_backward");
  std::size_t offset = 0;
  for (Tensor* p : parts) {
    auto g = p->grad();
    for (std::size_t r = 0; r < p->rows(); ++r) {
      for (std::size_t c = 0; c < p->cols(); ++c) {
        g[r * p->cols() + c] += axis == 0 ? dout.at(offset + r, c) : dout.at(r, offset + c);
      }
    }
    offset += p->dim(axis);
  }
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
  require_rank(x, 2, "slice");
  require_axis(axis, "slice");
  if (begin > end || end > x.dim(axis)) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) + ") out of bounds for " +
                     shape_string(x.shape()));
  }
  Tensor out = axis == 0 ? Tensor::matrix(end - begin, x.cols()) : Tensor::matrix(x.rows(), end - begin);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out.at(r, c) = axis == 0 ? x.at(begin + r, c) : x.at(r, begin + c);
    }
  }
  return out;
}

void slice_backward(Tensor& x, const Tensor& dout, std::size_t axis, std::size_t begin) {
  require_axis(axis, "slice_backward");
  auto g = x.grad();
  for (std::size_t r = 0; r < dout.rows(); ++r) {
    for (std::size_t c = 0; c < dout.cols(); ++c) {
      const std::size_t xr = axis == 0 ? begin + r : r;
      const std::size_t xc = axis == 0 ? c : begin + c;
      g[xr * x.cols() + xc] += dout.at(r, c);
    }
  }
}

Tensor mean(const Tensor& x, std::size_t axis) {
  require_rank(x, 2, "mean");
  require_axis(axis, "mean");
  if (x.dim(axis) == 0) throw ShapeError("mean: empty axis in " + shape_string(x.shape()));
  Tensor out = axis == 0 ? Tensor::matrix(1, x.cols()) : Tensor::matrix(x.rows(), 1);
  const double scale = 1.0 / static_cast<double>(x.dim(axis));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      (axis == 0 ? out.at(0, c) : out.at(r, 0)) += x.at(r, c) * scale;
    }
  }
  return out;
}

void mean_backward(Tensor& x, const Tensor& dout, std::size_t axis) {
  require_axis(axis, "mean_backward");
  auto g = x.grad();
  const double scale = 1.0 / static_cast<double>(x.dim(axis));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      g[r * x.cols() + c] += (axis == 0 ? dout.at(0, c) : dout.at(r, 0)) * scale;
    }
  }
}

}  // namespace scriptkit::ops
