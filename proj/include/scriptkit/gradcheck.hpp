#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "scriptkit/tensor.hpp"

namespace scriptkit {

struct GradCheckOptions {
  double eps = 1e-6;
  double tol = 1e-4;
  /// Lower bound of the relative-error denominator, so coordinates whose
  /// true gradient is zero are judged by absolute error.
  double floor = 1e-4;
  bool trainable_only = false;
};

struct GradCheckReport {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
  bool passed = true;
};

/// Loss callback. When with_grad is true it must also accumulate the
/// analytic gradient into the parameters' gradient slots (which grad_check
/// zeroes beforehand).
using LossFn = std::function<double(bool with_grad)>;

/// Compares the analytic gradient with central differences
///   (f(theta + eps) - f(theta - eps)) / (2 eps)
/// on every coordinate. Relative error is |a - n| / max(|a|, |n|, floor).
/// Throws ConfigError for eps <= 0 or a negative floor.
GradCheckReport grad_check(const LossFn& f, const ParamGroup& params, const GradCheckOptions& options = {});

}  // namespace scriptkit
