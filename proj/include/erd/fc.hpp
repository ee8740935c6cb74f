#pragma once

#include <cmath>
#include <string>

#include "erd/matrix.hpp"
#include "erd/random.hpp"

namespace erd {

enum class Activation { identity, relu, tanh };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

inline double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
  }
  return z;
}

/// d(activation)/dz evaluated at pre-activation z.
inline double activation_derivative(Activation a, double z) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

struct FcCache {
  Vec input;
  Vec pre_activation;
};

/// y = activation(W x + b). Caches the pre-activation for the backward pass.
inline Vec fc_forward(const Vec& x, const Matrix& w, const Vec& b,
                      Activation act, FcCache* cache = nullptr) {
  if (w.cols() != x.size())
    throw ShapeError("fc_forward: weight cols " + std::to_string(w.cols()) +
                     " != input length " + std::to_string(x.size()));
  if (b.size() != w.rows())
    throw ShapeError("fc_forward: bias length " + std::to_string(b.size()) +
                     " != weight rows " + std::to_string(w.rows()));
  Vec z;
  matvec(w, x, z);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += b[i];
  if (cache) {
    cache->input = x;
    cache->pre_activation = z;
  }
  for (double& v : z) v = apply_activation(act, v);
  return z;
}

class FcLayer {
 public:
  FcLayer() = default;
  FcLayer(std::size_t in_dim, std::size_t out_dim, Activation act)
      : w_(out_dim, in_dim), b_(out_dim, 1), act_(act) {}

  /// Uniform init in [-s, s], s = sqrt(6 / (fan_in + fan_out)); zero biases.
  void init_weights(RandomStream& rng) {
    const double s =
        std::sqrt(6.0 / static_cast<double>(w_.cols() + w_.rows()));
    for (double& v : w_.value.values()) v = rng.uniform(-s, s);
    b_.value.fill(0.0);
  }

  Vec forward(const Vec& x, FcCache* cache = nullptr) const {
    Vec bias(b_.rows());
    for (std::size_t i = 0; i < bias.size(); ++i) bias[i] = b_.value(i, 0);
    return fc_forward(x, w_.value, bias, act_, cache);
  }

  /// Accumulates weight/bias gradients and returns the input gradient.
  Vec backward(const Vec& dy, const FcCache& cache) {
    if (dy.size() != w_.rows())
      throw ShapeError("FcLayer::backward: grad length mismatch");
    Vec dz(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i)
      dz[i] = dy[i] * activation_derivative(act_, cache.pre_activation[i]);
    add_outer(w_.grad, dz, cache.input);
    for (std::size_t i = 0; i < dz.size(); ++i) b_.grad(i, 0) += dz[i];
    Vec dx(w_.cols(), 0.0);
    matvec_transpose_add(w_.value, dz, dx);
    return dx;
  }

  std::size_t in_dim() const { return w_.cols(); }
  std::size_t out_dim() const { return w_.rows(); }
  Activation activation() const { return act_; }

  Parameter& weight() { return w_; }
  Parameter& bias() { return b_; }
  const Parameter& weight() const { return w_; }
  const Parameter& bias() const { return b_; }

  void append_parameters(const std::string& prefix,
                         std::vector<NamedParam>& out) {
    out.push_back({prefix + ".weight", &w_});
    out.push_back({prefix + ".bias", &b_});
  }

 private:
  Parameter w_, b_;
  Activation act_ = Activation::identity;
};

}  // namespace erd
