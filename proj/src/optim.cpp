#include "scriptkit/optim.hpp"

#include <cmath>
#include <numbers>

#include "scriptkit/error.hpp"

namespace scriptkit {

AdamState AdamState::for_params(const ParamGroup& params) {
  AdamState state;
  for (const auto& entry : params) {
    state.m.emplace_back(entry.tensor->size(), 0.0);
    state.v.emplace_back(entry.tensor->size(), 0.0);
  }
  return state;
}

void adam_step(const ParamGroup& params, AdamState& state, const AdamHyper& hyper) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: state holds " + std::to_string(state.m.size()) + " slots for " +
                     std::to_string(params.size()) + " parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  std::size_t i = 0;
  for (const auto& entry : params) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    ++i;
    Tensor& p = *entry.tensor;
    if (m.size() != p.size() || v.size() != p.size()) {
      throw ShapeError("adam_step: state for '" + entry.name + "' has " + std::to_string(m.size()) +
                       " values, parameter has shape " + shape_string(p.shape()));
    }
    if (!entry.trainable || !p.has_grad()) continue;
    const auto g = std::as_const(p).grad();
    auto theta = p.values();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = hyper.beta1 * m[k] + (1.0 - hyper.beta1) * g[k];
      v[k] = hyper.beta2 * v[k] + (1.0 - hyper.beta2) * g[k] * g[k];
      theta[k] -= hyper.lr * hyper.weight_decay * theta[k];
      theta[k] -= hyper.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + hyper.eps);
    }
  }
}

double cosine_lr(double base_lr, std::size_t step, std::size_t total_steps, double min_lr) {
  if (total_steps == 0) return base_lr;
  const double progress = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
  return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace scriptkit
