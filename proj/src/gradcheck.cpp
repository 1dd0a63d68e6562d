#include "scriptkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "scriptkit/error.hpp"

namespace scriptkit {

GradCheckReport grad_check(const LossFn& f, const ParamGroup& params, const GradCheckOptions& options) {
  if (!(options.eps > 0.0)) throw ConfigError("grad_check: eps must be positive");
  if (options.floor < 0.0) throw ConfigError("grad_check: floor must be non-negative");

  params.zero_grad();
  f(true);
  std::vector<std::vector<double>> analytic;
  for (const auto& entry : params) {
    const auto g = std::as_const(*entry.tensor).grad();
    analytic.emplace_back(g.begin(), g.end());
  }

  GradCheckReport report;
  std::size_t pi = 0;
  for (const auto& entry : params) {
    const auto& a = analytic[pi++];
    if (options.trainable_only && !entry.trainable) continue;
    auto theta = entry.tensor->values();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double saved = theta[k];
      theta[k] = saved + options.eps;
      const double up = f(false);
      theta[k] = saved - options.eps;
      const double down = f(false);
      theta[k] = saved;
      const double numeric = (up - down) / (2.0 * options.eps);
      const double ak = a.empty() ? 0.0 : a[k];
      const double abs_err = std::abs(ak - numeric);
      const double rel_err = abs_err / std::max({std::abs(ak), std::abs(numeric), options.floor});
      ++report.coordinates;
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (report.worst_param.empty() || rel_err > report.max_rel_error) {
        report.max_rel_error = rel_err;
        report.worst_param = entry.name;
        report.worst_index = k;
      }
    }
  }
  report.passed = report.max_rel_error < options.tol;
  params.zero_grad();
  return report;
}

}  // namespace scriptkit
