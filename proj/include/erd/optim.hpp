#pragma once

#include <cmath>
#include <vector>

#include "erd/matrix.hpp"

namespace erd {

/// Global L2-norm gradient clipping across all parameters. If the norm of
/// the concatenated gradients exceeds `threshold`, every gradient is scaled
/// by threshold/norm; direction is preserved. Returns the factor applied.
inline double clip_gradients(const std::vector<Parameter*>& params,
                             double threshold) {
  if (!(threshold > 0.0))
    throw ArgumentError("clip_gradients: threshold must be > 0");
  double sq = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.values()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm <= threshold) return 1.0;
  const double factor = threshold / norm;
  for (Parameter* p : params)
    for (double& g : p->grad.values()) g *= factor;
  return factor;
}

/// velocity <- momentum * velocity - lr * grad;  value <- value + velocity.
/// Gradients are zeroed afterwards.
inline void sgd_momentum_step(const std::vector<Parameter*>& params,
                              double learning_rate, double momentum) {
  if (!(learning_rate > 0.0))
    throw ArgumentError("sgd_momentum_step: learning_rate must be > 0");
  if (momentum < 0.0 || momentum >= 1.0)
    throw ArgumentError("sgd_momentum_step: momentum must be in [0, 1)");
  for (Parameter* p : params) {
    auto& val = p->value.values();
    auto& grad = p->grad.values();
    auto& vel = p->velocity.values();
    for (std::size_t i = 0; i < val.size(); ++i) {
      vel[i] = momentum * vel[i] - learning_rate * grad[i];
      val[i] += vel[i];
      grad[i] = 0.0;
    }
  }
}

inline double global_grad_norm(const std::vector<Parameter*>& params) {
  double sq = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.values()) sq += g * g;
  return std::sqrt(sq);
}

}  // namespace erd
