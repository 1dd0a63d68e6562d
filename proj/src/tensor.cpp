#include "scriptkit/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <numeric>

#include "scriptkit/error.hpp"

namespace scriptkit {

namespace {

std::size_t volume(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), values_(volume(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != volume(shape_)) {
    throw ShapeError("shape " + shape_string(shape_) + " needs " + std::to_string(volume(shape_)) +
                     " values, got " + std::to_string(values_.size()));
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_string(shape_));
  }
  return shape_[axis];
}

std::span<double> Tensor::grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() { grad_.assign(values_.size(), 0.0); }

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

void Tensor::reshape(Shape shape) {
  if (volume(shape) != values_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  shape_ = std::move(shape);
}

bool Tensor::same_values(const Tensor& other) const {
  return shape_ == other.shape_ &&
         (values_.empty() || std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0);
}

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

void require_rank(const Tensor& t, std::size_t rank, std::string_view op) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                     shape_string(t.shape()));
  }
}

void ParamGroup::add(std::string name, Tensor& tensor, bool trainable) {
  for (const auto& e : entries_) {
    if (e.name == name) throw ConfigError("duplicate parameter name " + name);
  }
  entries_.push_back({std::move(name), &tensor, trainable});
}

Tensor& ParamGroup::at(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return *e.tensor;
  }
  throw ConfigError("unknown parameter " + std::string(name));
}

void ParamGroup::set_trainable(std::string_view name, bool trainable) {
  for (auto& e : entries_) {
    if (e.name == name) {
      e.trainable = trainable;
      return;
    }
  }
  throw ConfigError("unknown parameter " + std::string(name));
}

void ParamGroup::zero_grad() const {
  for (const auto& e : entries_) e.tensor->zero_grad();
}

std::size_t ParamGroup::scalar_count(bool trainable_only) const {
  std::size_t n = 0;
  for (const auto& e : entries_) {
    if (!trainable_only || e.trainable) n += e.tensor->size();
  }
  return n;
}

}  // namespace scriptkit
