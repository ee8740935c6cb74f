#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "erd/matrix.hpp"

namespace erd {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
};

/// Central finite-difference verification of analytic gradients.
///
/// `compute_analytic` must zero all gradients and run forward+backward so
/// that every Parameter::grad holds the analytic gradient of the scalar
/// `loss` w.r.t. that parameter. `loss` must be a pure forward evaluation.
/// Relative error is |analytic - numeric| / (|analytic| + |numeric| + 1e-10).
///
/// Coordinates with near-vanishing gradients sit below the cancellation
/// noise of a fixed step (~ eps_mach |loss| / epsilon), so those are retried
/// at larger steps and the most consistent estimate kept. A genuinely wrong
/// gradient disagrees at every step size and still surfaces.
inline GradCheckResult finite_difference_check(
    const std::vector<NamedParam>& params, const std::function<double()>& loss,
    const std::function<void()>& compute_analytic, double epsilon = 1e-5) {
  if (!(epsilon > 0.0))
    throw ArgumentError("finite_difference_check: epsilon must be > 0");

  compute_analytic();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& np : params) analytic.push_back(np.param->grad.values());

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& values = params[pi].param->value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      const double a = analytic[pi][i];
      double rel = 0.0;
      for (const double step : {epsilon, 8.0 * epsilon, 64.0 * epsilon}) {
        values[i] = saved + step;
        const double lp = loss();
        values[i] = saved - step;
        const double lm = loss();
        values[i] = saved;
        const double numeric = (lp - lm) / (2.0 * step);
        const double r = std::fabs(a - numeric) /
                         (std::fabs(a) + std::fabs(numeric) + 1e-10);
        if (step == epsilon || r < rel) rel = r;
        if (rel < 1e-5) break;  // consistent estimate; no retry needed
      }
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_parameter = params[pi].name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace erd
