#pragma once

// Slow, independent reference implementations used by the self-test command
// and the verification suites. These deliberately avoid the optimized code
// paths they are checked against: the GMM likelihood is evaluated as a plain
// density sum without log-sum-exp, and the Viterbi objective by exhaustive
// path enumeration.

#include <cmath>
#include <vector>

#include "erd/eval.hpp"
#include "erd/gmm.hpp"

namespace erd::reference {

/// Direct density evaluation: -log sum_k w_k prod_d N(x_d; mu, var).
/// Underflows for extreme inputs; only valid where the naive form is finite.
inline double gmm_nll_naive(const GmmParams& g, const Vec& target) {
  double total = 0.0;
  for (std::size_t i = 0; i < g.components(); ++i) {
    double density = g.weights[i];
    for (std::size_t j = 0; j < g.dim(); ++j) {
      const double var = g.variances(i, j);
      const double diff = target[j] - g.means(i, j);
      density *= std::exp(-0.5 * diff * diff / var) /
                 std::sqrt(2.0 * 3.14159265358979323846 * var);
    }
    total += density;
  }
  return -std::log(total);
}

struct ViterbiPath {
  double objective = 0.0;
  std::vector<std::size_t> states;  // row-major cell index per frame
};

/// Exhaustive maximization of the smoothing objective for one joint.
/// Cost grows as (N^2)^T; intended for N <= 3, T <= 5.
inline ViterbiPath viterbi_bruteforce_joint(
    const std::vector<const Matrix*>& unaries, double smoothness_scale) {
  const std::size_t t_len = unaries.size();
  const std::size_t n = unaries[0]->rows();
  const std::size_t states = n * n;

  ViterbiPath best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> path(t_len, 0);
  while (true) {
    double obj = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) {
      obj += unaries[t]->values()[path[t]];
      if (t > 0) {
        const double r0 = static_cast<double>(path[t - 1] / n);
        const double c0 = static_cast<double>(path[t - 1] % n);
        const double r1 = static_cast<double>(path[t] / n);
        const double c1 = static_cast<double>(path[t] % n);
        obj += std::exp(-std::hypot(r1 - r0, c1 - c0) / smoothness_scale);
      }
    }
    if (obj > best.objective) {
      best.objective = obj;
      best.states = path;
    }
    // odometer increment over all state combinations
    std::size_t t = 0;
    while (t < t_len && ++path[t] == states) path[t++] = 0;
    if (t == t_len) break;
  }
  return best;
}

/// DP path objective recomputed directly from a result path (for comparing
/// objectives rather than argmax paths).
inline double viterbi_objective(const std::vector<const Matrix*>& unaries,
                                const std::vector<std::size_t>& states,
                                double smoothness_scale) {
  const std::size_t n = unaries[0]->rows();
  double obj = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    obj += unaries[t]->values()[states[t]];
    if (t > 0) {
      const double r0 = static_cast<double>(states[t - 1] / n);
      const double c0 = static_cast<double>(states[t - 1] % n);
      const double r1 = static_cast<double>(states[t] / n);
      const double c1 = static_cast<double>(states[t] % n);
      obj += std::exp(-std::hypot(r1 - r0, c1 - c0) / smoothness_scale);
    }
  }
  return obj;
}

/// Exhaustive nearest-window scan over a corpus: every window of length n,
/// squared Euclidean distance over the leading `dims` dimensions.
struct NearestWindow {
  std::size_t sequence_index = 0, window_start = 0;
  double distance = std::numeric_limits<double>::infinity();
};

inline NearestWindow nearest_window_bruteforce(
    const std::vector<std::vector<Vec>>& corpus, const std::vector<Vec>& query,
    std::size_t n, std::size_t dims) {
  NearestWindow best;
  const std::size_t off = query.size() - n;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    for (std::size_t start = 0; start + n < corpus[si].size(); ++start) {
      double d2 = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const Vec& a = query[off + t];
        const Vec& b = corpus[si][start + t];
        const std::size_t use = dims ? dims : a.size();
        for (std::size_t i = 0; i < use; ++i) {
          const double diff = a[i] - b[i];
          d2 += diff * diff;
        }
      }
      if (d2 < best.distance) {
        best.distance = d2;
        best.sequence_index = si;
        best.window_start = start;
      }
    }
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

}  // namespace erd::reference
