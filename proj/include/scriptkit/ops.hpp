#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "scriptkit/tensor.hpp"

// Primitive operations on rank-2 tensors. Each forward has a matching
// backward that adds the exact gradient of a downstream scalar into the
// inputs' gradient slots, given dout = d(scalar)/d(output).
namespace scriptkit::ops {

Tensor matmul(const Tensor& a, const Tensor& b);
void matmul_backward(Tensor& a, Tensor& b, const Tensor& dout);

Tensor add(const Tensor& a, const Tensor& b);
void add_backward(Tensor& a, Tensor& b, const Tensor& dout);

Tensor sigmoid(const Tensor& x);
void sigmoid_backward(Tensor& x, const Tensor& y, const Tensor& dout);

Tensor tanh(const Tensor& x);
void tanh_backward(Tensor& x, const Tensor& y, const Tensor& dout);

Tensor softmax(const Tensor& x, std::size_t axis);
void softmax_backward(Tensor& x, const Tensor& y, const Tensor& dout, std::size_t axis);

Tensor concat(const std::vector<const Tensor*>& parts, std::size_t axis);
void concat_backward(const std::vector<Tensor*>& parts, const Tensor& dout, std::size_t axis);

/// Rows (axis 0) or columns (axis 1) [begin, end).
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end);
void slice_backward(Tensor& x, const Tensor& dout, std::size_t axis, std::size_t begin);

/// Mean over one axis; the reduced axis keeps extent 1.
Tensor mean(const Tensor& x, std::size_t axis);
void mean_backward(Tensor& x, const Tensor& dout, std::size_t axis);

// Scalar helpers used by the layers.
inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace scriptkit::ops
