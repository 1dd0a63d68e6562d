#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scriptkit {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient accumulator
/// of the same shape.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  /// Throws ShapeError when values.size() differs from the shape's volume.
  Tensor(Shape shape, std::vector<double> values);

  static Tensor matrix(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Matrix accessors; valid for rank-2 tensors.
  std::size_t rows() const { return dim(0); }
  std::size_t cols() const { return dim(1); }
  double& at(std::size_t r, std::size_t c) { return values_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * shape_[1] + c]; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * shape_[1], shape_[1]}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * shape_[1], shape_[1]}; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool has_grad() const { return !grad_.empty(); }
  /// Gradient slot, allocated (zeroed) on first use.
  std::span<double> grad();
  /// Empty span when no gradient has been accumulated yet.
  std::span<const double> grad() const { return grad_; }
  void zero_grad();
  void clear_grad() { grad_.clear(); }

  void fill(double value);
  /// Reinterprets the data under a new shape of equal volume.
  void reshape(Shape shape);

  /// Shape and bitwise value equality; gradients are ignored.
  bool same_values(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

/// Throws ShapeError naming both shapes unless a and b have equal shapes.
void require_same_shape(const Tensor& a, const Tensor& b, std::string_view op);
/// Throws ShapeError unless t has the expected rank.
void require_rank(const Tensor& t, std::size_t rank, std::string_view op);

struct ParamEntry {
  std::string name;
  Tensor* tensor;
  bool trainable;
};

/// Non-owning, ordered list of named parameter tensors. The order is the
/// registration order and is what checkpoints and optimizers rely on.
class ParamGroup {
 public:
  /// Throws ConfigError for duplicate names.
  void add(std::string name, Tensor& tensor, bool trainable = true);

  const std::vector<ParamEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Throws ConfigError for unknown names.
  Tensor& at(std::string_view name) const;
  void set_trainable(std::string_view name, bool trainable);

  void zero_grad() const;
  std::size_t scalar_count(bool trainable_only = false) const;

 private:
  std::vector<ParamEntry> entries_;
};

}  // namespace scriptkit
