#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "erd/matrix.hpp"
#include "erd/random.hpp"

namespace erd {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

/// Diagonal Gaussian mixture over the next frame, as emitted by the decoder:
/// mixture weights from a softmax, variances from an exponential layer.
/// `pad` records the additive variance padding already applied, so the
/// backward pass can recover exp(s) = variance - pad.
struct GmmParams {
  Vec weights;      // K, simplex
  Matrix means;     // K x D
  Matrix variances; // K x D, strictly positive
  double pad = 0.0;

  std::size_t components() const { return weights.size(); }
  std::size_t dim() const { return means.cols(); }
};

/// Gradients of the negative log-likelihood w.r.t. the decoder's raw
/// outputs: weight logits, means, log-variances.
struct GmmGrads {
  Vec d_logits;
  Matrix d_means;
  Matrix d_logvars;
};

/// Raw head vector layout: [logits (K) | means (K*D) | log-variances (K*D)],
/// means and log-variances row-major by component.
inline std::size_t gmm_head_dim(std::size_t k, std::size_t d) {
  return k * (1 + 2 * d);
}

inline GmmParams unpack_gmm(const Vec& raw, std::size_t k, std::size_t d) {
  if (raw.size() != gmm_head_dim(k, d))
    throw ShapeError("unpack_gmm: raw head size " + std::to_string(raw.size()) +
                     " != " + std::to_string(gmm_head_dim(k, d)));
  GmmParams g;
  g.weights.resize(k);
  g.means = Matrix(k, d);
  g.variances = Matrix(k, d);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) mx = std::max(mx, raw[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    g.weights[i] = std::exp(raw[i] - mx);
    z += g.weights[i];
  }
  for (std::size_t i = 0; i < k; ++i) g.weights[i] /= z;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      g.means(i, j) = raw[k + i * d + j];
      g.variances(i, j) = std::exp(raw[k + k * d + i * d + j]);
    }
  return g;
}

/// Training-time variance floor: variances += pad. Applied each iteration so
/// components cannot collapse onto the mixture means; disabled at test time.
inline GmmParams pad_variances(GmmParams g, double pad) {
  if (pad < 0.0) throw ArgumentError("pad_variances: pad must be >= 0");
  for (double& v : g.variances.values()) v += pad;
  g.pad += pad;
  return g;
}

namespace detail {
/// log of w_k * prod_d N(x_d; mu_kd, var_kd) for every component.
inline Vec component_log_joint(const GmmParams& g, const Vec& target) {
  const std::size_t k = g.components(), d = g.dim();
  if (target.size() != d) throw ShapeError("gmm_nll: target dimension mismatch");
  Vec a(k);
  for (std::size_t i = 0; i < k; ++i) {
    double acc = g.weights[i] > 0.0
                     ? std::log(g.weights[i])
                     : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d; ++j) {
      const double var = g.variances(i, j);
      if (!(var > 0.0)) throw NumericError("gmm_nll: non-positive variance");
      const double diff = target[j] - g.means(i, j);
      acc += -0.5 * (kLogTwoPi + std::log(var) + diff * diff / var);
    }
    a[i] = acc;
  }
  return a;
}

inline double logsumexp(const Vec& a) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : a) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : a) s += std::exp(v - mx);
  return mx + std::log(s);
}
}  // namespace detail

/// -log sum_k w_k prod_d N(target_d; mu_kd, var_kd), via log-sum-exp.
inline double gmm_nll(const GmmParams& g, const Vec& target) {
  return -detail::logsumexp(detail::component_log_joint(g, target));
}

/// Exact gradients through the softmax (weights) and exponential (variances)
/// parameterizations, using posterior responsibilities.
inline GmmGrads gmm_nll_backward(const GmmParams& g, const Vec& target) {
  const std::size_t k = g.components(), d = g.dim();
  Vec a = detail::component_log_joint(g, target);
  const double lse = detail::logsumexp(a);
  Vec resp(k);
  for (std::size_t i = 0; i < k; ++i) resp[i] = std::exp(a[i] - lse);

  GmmGrads out;
  out.d_logits.resize(k);
  out.d_means = Matrix(k, d);
  out.d_logvars = Matrix(k, d);
  for (std::size_t i = 0; i < k; ++i) {
    out.d_logits[i] = g.weights[i] - resp[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double var = g.variances(i, j);
      const double diff = target[j] - g.means(i, j);
      out.d_means(i, j) = -resp[i] * diff / var;
      const double d_var = (resp[i] / (2.0 * var)) * (1.0 - diff * diff / var);
      out.d_logvars(i, j) = d_var * (var - g.pad);  // d var / d s = exp(s)
    }
  }
  return out;
}

/// Packs GmmGrads back into the raw head layout (inverse of unpack_gmm).
inline Vec pack_gmm_grads(const GmmGrads& grads) {
  const std::size_t k = grads.d_logits.size(), d = grads.d_means.cols();
  Vec raw(gmm_head_dim(k, d));
  for (std::size_t i = 0; i < k; ++i) raw[i] = grads.d_logits[i];
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      raw[k + i * d + j] = grads.d_means(i, j);
      raw[k + k * d + i * d + j] = grads.d_logvars(i, j);
    }
  return raw;
}

enum class SampleMode { most_probable, stochastic };

/// most_probable: mean of the highest-weight component (ties -> lowest
/// index). stochastic: draw a component by weight, then a diagonal Gaussian
/// sample; deterministic under a fixed stream.
inline Vec sample_output(const GmmParams& g, SampleMode mode,
                         RandomStream& rng) {
  const std::size_t k = g.components(), d = g.dim();
  std::size_t pick = 0;
  if (mode == SampleMode::most_probable) {
    for (std::size_t i = 1; i < k; ++i)
      if (g.weights[i] > g.weights[pick]) pick = i;
    Vec out(d);
    for (std::size_t j = 0; j < d; ++j) out[j] = g.means(pick, j);
    return out;
  }
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    cum += g.weights[i];
    if (u < cum) {
      pick = i;
      break;
    }
    pick = i;  // fall through to last component on rounding
  }
  Vec out(d);
  for (std::size_t j = 0; j < d; ++j)
    out[j] = rng.normal(g.means(pick, j), std::sqrt(g.variances(pick, j)));
  return out;
}

/// 0.5 * ||y - target||^2 and its gradient y - target.
inline double euclidean_loss(const Vec& y, const Vec& target, Vec* grad = nullptr) {
  if (y.size() != target.size())
    throw ShapeError("euclidean_loss: dimension mismatch");
  double loss = 0.0;
  if (grad) grad->resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double diff = y[i] - target[i];
    loss += 0.5 * diff * diff;
    if (grad) (*grad)[i] = diff;
  }
  return loss;
}

}  // namespace erd
