#pragma once

#include <cstddef>
#include <vector>

#include "scriptkit/tensor.hpp"

namespace scriptkit {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// First and second moments, one pair per registered parameter.
struct AdamState {
  std::size_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState for_params(const ParamGroup& params);
};

/// AdamW with bias correction and decoupled weight decay:
///   theta -= lr * decay * theta
///   theta -= lr * m_hat / (sqrt(v_hat) + eps)
/// Frozen parameters and parameters without a gradient slot are skipped.
/// Throws ShapeError when the state does not match the parameters.
void adam_step(const ParamGroup& params, AdamState& state, const AdamHyper& hyper);

/// Cosine decay from base_lr at step 0 to min_lr at total_steps.
double cosine_lr(double base_lr, std::size_t step, std::size_t total_steps, double min_lr = 0.0);

}  // namespace scriptkit
