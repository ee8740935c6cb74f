#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "erd/matrix.hpp"
#include "erd/mocap.hpp"
#include "erd/pose2d.hpp"

namespace erd {

// -- heat maps ----------------------------------------------------------------

/// K per-joint N x N nonnegative score grids for one frame, covering the
/// person's bounding box.
struct HeatMapStack {
  std::size_t joints = 0;
  std::size_t side = 0;
  std::vector<Matrix> maps;  // one N x N grid per joint

  void validate() const {
    if (maps.size() != joints)
      throw ShapeError("HeatMapStack: map count != joint count");
    for (const auto& m : maps) {
      if (m.rows() != side || m.cols() != side)
        throw ShapeError("HeatMapStack: grid size mismatch");
      for (double v : m.values())
        if (!std::isfinite(v) || v < 0.0)
          throw NumericError("HeatMapStack: scores must be finite and >= 0");
    }
  }
};

using HeatMapSequence = std::vector<HeatMapStack>;

struct GridLoc {
  std::size_t row = 0, col = 0;
};

/// Highest-scoring cell per joint; ties resolved to the row-major first
/// occurrence.
inline std::vector<GridLoc> heatmap_argmax(const HeatMapStack& h) {
  std::vector<GridLoc> out(h.joints);
  for (std::size_t j = 0; j < h.joints; ++j) {
    const Matrix& m = h.maps[j];
    double best = -1.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m(r, c) > best) {
          best = m(r, c);
          out[j] = {r, c};
        }
  }
  return out;
}

/// Bilinear 2x upsampling with half-pixel-aligned sample centers: fine cell
/// r samples the coarse grid at r/2 - 0.25, clamped at the borders.
inline Matrix upsample_bilinear_2x(const Matrix& coarse) {
  const std::size_t n = coarse.rows();
  if (coarse.cols() != n) throw ShapeError("upsample_bilinear_2x: non-square grid");
  Matrix fine(2 * n, 2 * n);
  auto sample_axis = [&](std::size_t f, std::size_t& lo, std::size_t& hi,
                         double& w_hi) {
    double s = 0.5 * static_cast<double>(f) - 0.25;
    if (s < 0.0) s = 0.0;
    const double max_s = static_cast<double>(n - 1);
    if (s > max_s) s = max_s;
    lo = static_cast<std::size_t>(s);
    if (lo >= n - 1) lo = n - 1;
    hi = std::min(lo + 1, n - 1);
    w_hi = s - static_cast<double>(lo);
  };
  for (std::size_t r = 0; r < 2 * n; ++r) {
    std::size_t r0, r1;
    double wr;
    sample_axis(r, r0, r1, wr);
    for (std::size_t c = 0; c < 2 * n; ++c) {
      std::size_t c0, c1;
      double wc;
      sample_axis(c, c0, c1, wc);
      fine(r, c) = (1.0 - wr) * ((1.0 - wc) * coarse(r0, c0) + wc * coarse(r0, c1)) +
                   wr * ((1.0 - wc) * coarse(r1, c0) + wc * coarse(r1, c1));
    }
  }
  return fine;
}

/// Upsamples the coarse stack and adds it elementwise to the fine stack,
/// producing the combined fine-resolution heat maps.
inline HeatMapStack fuse_scales(const HeatMapStack& coarse,
                                const HeatMapStack& fine) {
  if (coarse.joints != fine.joints)
    throw ShapeError("fuse_scales: joint count mismatch");
  if (fine.side != 2 * coarse.side)
    throw ShapeError("fuse_scales: fine side must be 2x coarse side");
  HeatMapStack out = fine;
  for (std::size_t j = 0; j < fine.joints; ++j) {
    Matrix up = upsample_bilinear_2x(coarse.maps[j]);
    for (std::size_t i = 0; i < up.size(); ++i)
      out.maps[j].values()[i] += up.values()[i];
  }
  return out;
}

/// Heat-map sequence file: header line `K N T`, then T*K lines of N*N
/// scores (frame-major, joint within frame), whitespace separated.
inline HeatMapSequence load_heatmaps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_heatmaps: cannot open '" + path + "'");
  std::size_t k = 0, n = 0, t = 0;
  if (!(in >> k >> n >> t) || k == 0 || n == 0 || t == 0)
    throw ParseError(path + ":1: expected header 'K N T' with positive values");
  HeatMapSequence seq(t);
  for (std::size_t ti = 0; ti < t; ++ti) {
    seq[ti].joints = k;
    seq[ti].side = n;
    seq[ti].maps.assign(k, Matrix(n, n));
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n * n; ++i)
        if (!(in >> seq[ti].maps[j].values()[i]))
          throw ParseError(path + ": truncated scores at frame " +
                           std::to_string(ti) + ", joint " + std::to_string(j));
    seq[ti].validate();
  }
  return seq;
}

inline void write_heatmaps(const HeatMapSequence& seq, const std::string& path) {
  if (seq.empty()) throw ArgumentError("write_heatmaps: empty sequence");
  std::ofstream out(path);
  if (!out) throw ArgumentError("write_heatmaps: cannot open '" + path + "'");
  out << seq[0].joints << " " << seq[0].side << " " << seq.size() << "\n";
  for (const auto& stack : seq)
    for (const auto& m : stack.maps) {
      for (std::size_t i = 0; i < m.size(); ++i)
        out << (i ? " " : "") << detail::fmt_double(m.values()[i]);
      out << "\n";
    }
}

// -- Viterbi temporal smoothing -------------------------------------------------

/// Per joint independently, picks the grid-location path maximizing
///   sum_t unary_t(loc_t) + sum_{t>=1} exp(-||loc_t - loc_{t-1}|| / scale)
/// by forward dynamic programming with backtracking. Unaries are the raw
/// heat-map scores; distances are Euclidean in cell units between cell
/// centers. Ties resolve to the smallest row-major state index.
inline Pose2dSequence viterbi_smooth(const HeatMapSequence& seq,
                                     double smoothness_scale) {
  if (seq.empty()) throw ArgumentError("viterbi_smooth: empty sequence");
  if (!(smoothness_scale > 0.0))
    throw ArgumentError("viterbi_smooth: smoothness_scale must be > 0");
  const std::size_t k = seq[0].joints, n = seq[0].side, t_len = seq.size();
  const std::size_t states = n * n;
  for (const auto& s : seq)
    if (s.joints != k || s.side != n)
      throw ShapeError("viterbi_smooth: inconsistent stack shapes");

  // pairwise[p][s] = exp(-dist(p, s) / scale)
  std::vector<double> pairwise(states * states);
  for (std::size_t p = 0; p < states; ++p) {
    const double pr = static_cast<double>(p / n), pc = static_cast<double>(p % n);
    for (std::size_t s = 0; s < states; ++s) {
      const double sr = static_cast<double>(s / n), sc = static_cast<double>(s % n);
      pairwise[p * states + s] =
          std::exp(-std::hypot(sr - pr, sc - pc) / smoothness_scale);
    }
  }

  Pose2dSequence out;
  out.width = static_cast<double>(n);
  out.height = static_cast<double>(n);
  out.frames.assign(t_len, std::vector<Point2>(k));

  std::vector<double> value(states), next(states);
  std::vector<std::uint32_t> back((t_len > 1 ? t_len - 1 : 0) * states);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t s = 0; s < states; ++s)
      value[s] = seq[0].maps[j].values()[s];
    for (std::size_t t = 1; t < t_len; ++t) {
      for (std::size_t s = 0; s < states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        for (std::size_t p = 0; p < states; ++p) {
          const double cand = value[p] + pairwise[p * states + s];
          if (cand > best) {
            best = cand;
            arg = static_cast<std::uint32_t>(p);
          }
        }
        next[s] = best + seq[t].maps[j].values()[s];
        back[(t - 1) * states + s] = arg;
      }
      value.swap(next);
    }
    std::size_t s = 0;
    for (std::size_t c = 1; c < states; ++c)
      if (value[c] > value[s]) s = c;
    for (std::size_t t = t_len; t-- > 0;) {
      out.frames[t][j] = {static_cast<double>(s % n),
                          static_cast<double>(s / n)};
      if (t > 0) s = back[(t - 1) * states + s];
    }
  }
  return out;
}

// -- metrics --------------------------------------------------------------------

struct PckCurve {
  std::vector<double> thresholds;  // normalized radii, ascending
  std::vector<double> rates;       // detection rate in [0, 1] per threshold
};

/// Percentage of correct keypoints: rate(tau) is the fraction of
/// (frame, joint) pairs with prediction error within tau times the frame's
/// reference distance (e.g. left hip to right shoulder).
inline PckCurve pck_curve(const Pose2dSequence& pred,
                          const Pose2dSequence& truth,
                          const std::vector<double>& reference,
                          std::vector<double> thresholds) {
  if (pred.size() != truth.size() || pred.joint_count() != truth.joint_count())
    throw ShapeError("pck_curve: prediction/truth shape mismatch");
  if (reference.size() != truth.size())
    throw ShapeError("pck_curve: reference distance per frame required");
  if (pred.size() == 0) throw ArgumentError("pck_curve: empty sequences");
  for (std::size_t t = 0; t < reference.size(); ++t)
    if (!(reference[t] > 0.0))
      throw ArgumentError("pck_curve: non-positive reference distance at frame " +
                          std::to_string(t));
  std::sort(thresholds.begin(), thresholds.end());
  PckCurve out;
  out.thresholds = thresholds;
  out.rates.assign(thresholds.size(), 0.0);
  const std::size_t total = pred.size() * pred.joint_count();
  for (std::size_t t = 0; t < pred.size(); ++t)
    for (std::size_t j = 0; j < pred.joint_count(); ++j) {
      const double d = distance(pred.frames[t][j], truth.frames[t][j]);
      for (std::size_t i = 0; i < thresholds.size(); ++i)
        if (d <= thresholds[i] * reference[t]) out.rates[i] += 1.0;
    }
  for (double& r : out.rates) r /= static_cast<double>(total);
  return out;
}

/// Reference distance per frame between two joints of the truth poses.
inline std::vector<double> reference_distances(const Pose2dSequence& truth,
                                               std::size_t joint_a,
                                               std::size_t joint_b) {
  if (joint_a >= truth.joint_count() || joint_b >= truth.joint_count())
    throw ArgumentError("reference_distances: joint index out of range");
  std::vector<double> out(truth.size());
  for (std::size_t t = 0; t < truth.size(); ++t)
    out[t] = distance(truth.frames[t][joint_a], truth.frames[t][joint_b]);
  return out;
}

struct HorizonErrorReport {
  std::vector<double> horizons_ms;
  std::vector<double> mean_errors;
  std::size_t prefix_count = 0;
};

inline std::vector<double> default_horizons_ms() {
  return {80, 160, 240, 320, 400, 480, 560};
}

/// Maps a temporal horizon to a 1-based frame count; the product
/// horizon_ms * rate / 1000 must be integral within 1e-9.
inline std::size_t horizon_frame_index(double horizon_ms, double frame_rate_hz) {
  const double f = horizon_ms * frame_rate_hz / 1000.0;
  const double r = std::round(f);
  if (std::fabs(f - r) > 1e-9 || r < 1.0)
    throw ArgumentError("horizon_frame_index: horizon " +
                        std::to_string(horizon_ms) +
                        " ms is not an integral frame count at " +
                        std::to_string(frame_rate_hz) + " Hz");
  return static_cast<std::size_t>(r);
}

inline void require_increasing_horizons(const std::vector<double>& horizons) {
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (!(horizons[i] > horizons[i - 1]))
      throw ArgumentError("horizons must be strictly increasing");
}

/// Euclidean norm between generated and ground-truth continuation at each
/// horizon. Both sequences are aligned so frame i predicts (prefix end + i
/// + 1); averaging across prefixes is the caller's protocol.
inline HorizonErrorReport horizon_prediction_error(
    const std::vector<Vec>& generated, const std::vector<Vec>& truth,
    const std::vector<double>& horizons_ms, double frame_rate_hz) {
  require_increasing_horizons(horizons_ms);
  HorizonErrorReport rep;
  rep.horizons_ms = horizons_ms;
  rep.prefix_count = 1;
  for (const double h : horizons_ms) {
    const std::size_t idx = horizon_frame_index(h, frame_rate_hz);
    if (idx > generated.size() || idx > truth.size())
      throw ArgumentError("horizon_prediction_error: sequences too short for " +
                          std::to_string(h) + " ms horizon");
    const Vec& g = generated[idx - 1];
    const Vec& t = truth[idx - 1];
    if (g.size() != t.size())
      throw ShapeError("horizon_prediction_error: dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = g[i] - t[i];
      sq += d * d;
    }
    rep.mean_errors.push_back(std::sqrt(sq));
  }
  return rep;
}

// -- prefix-averaged protocol -----------------------------------------------------

struct HorizonProtocolOptions {
  std::vector<double> horizons_ms = default_horizons_ms();
  std::size_t prefixes = 8;    // evenly spaced per test sequence
  std::size_t prefix_len = 100;
  std::size_t norm_dims = 0;   // leading dims entering the norm; 0 = all
};

/// Runs the Table-1 style protocol: for each test sequence, `prefixes`
/// evenly spaced conditioning prefixes; a generator produces the raw
/// continuation which is compared (optionally standardized) against ground
/// truth at every horizon, averaged over all prefixes of all sequences.
inline HorizonErrorReport run_horizon_protocol(
    const std::function<std::vector<Vec>(const std::vector<Vec>& raw_prefix,
                                         std::size_t steps)>& generator,
    const std::vector<std::vector<Vec>>& test_sequences, double frame_rate_hz,
    const HorizonProtocolOptions& opt, const Standardizer* standardizer) {
  if (opt.horizons_ms.empty())
    throw ArgumentError("run_horizon_protocol: no horizons");
  require_increasing_horizons(opt.horizons_ms);
  if (opt.prefixes < 1 || opt.prefix_len < 1)
    throw ArgumentError("run_horizon_protocol: bad prefix options");
  std::size_t max_idx = 0;
  for (double h : opt.horizons_ms)
    max_idx = std::max(max_idx, horizon_frame_index(h, frame_rate_hz));

  HorizonErrorReport total;
  total.horizons_ms = opt.horizons_ms;
  total.mean_errors.assign(opt.horizons_ms.size(), 0.0);
  total.prefix_count = 0;

  auto maybe_standardize = [&](const Vec& v) {
    return standardizer ? standardizer->apply(v) : v;
  };

  for (const auto& seq : test_sequences) {
    if (seq.size() < opt.prefix_len + max_idx)
      throw ArgumentError(
          "run_horizon_protocol: sequence too short for prefix length and max "
          "horizon");
    const std::size_t lo = opt.prefix_len;              // earliest prefix end
    const std::size_t hi = seq.size() - max_idx;        // latest prefix end
    for (std::size_t pi = 0; pi < opt.prefixes; ++pi) {
      const std::size_t end =
          opt.prefixes == 1
              ? lo
              : lo + (pi * (hi - lo)) / (opt.prefixes - 1);
      std::vector<Vec> prefix(seq.begin() + (end - opt.prefix_len),
                              seq.begin() + end);
      std::vector<Vec> generated = generator(prefix, max_idx);
      if (generated.size() < max_idx)
        throw ArgumentError("run_horizon_protocol: generator returned too few frames");
      for (std::size_t hi_i = 0; hi_i < opt.horizons_ms.size(); ++hi_i) {
        const std::size_t idx =
            horizon_frame_index(opt.horizons_ms[hi_i], frame_rate_hz);
        Vec g = maybe_standardize(generated[idx - 1]);
        Vec t = maybe_standardize(seq[end + idx - 1]);
        const std::size_t dims = opt.norm_dims ? opt.norm_dims : g.size();
        double sq = 0.0;
        for (std::size_t i = 0; i < dims; ++i) {
          const double d = g[i] - t[i];
          sq += d * d;
        }
        total.mean_errors[hi_i] += std::sqrt(sq);
      }
      ++total.prefix_count;
    }
  }
  for (double& e : total.mean_errors)
    e /= static_cast<double>(total.prefix_count);
  return total;
}

// -- report output ------------------------------------------------------------------

inline void write_horizon_report_csv(const HorizonErrorReport& rep,
                                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("write_horizon_report_csv: cannot open '" + path + "'");
  out << "horizon_ms,mean_error,prefixes\n";
  for (std::size_t i = 0; i < rep.horizons_ms.size(); ++i)
    out << detail::fmt_double(rep.horizons_ms[i]) << ","
        << detail::fmt_double(rep.mean_errors[i]) << "," << rep.prefix_count
        << "\n";
}

inline void write_pck_csv(const PckCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("write_pck_csv: cannot open '" + path + "'");
  out << "threshold,detection_rate\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
    out << detail::fmt_double(curve.thresholds[i]) << ","
        << detail::fmt_double(curve.rates[i]) << "\n";
}

}  // namespace erd
