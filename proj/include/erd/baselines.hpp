#pragma once

#include <limits>
#include <vector>

#include "erd/model.hpp"
#include "erd/pose2d.hpp"

namespace erd {

/// Nearest-neighbor N-gram matcher: every length-N window of the training
/// corpus that still has a continuation is a candidate; a query prefix is
/// matched by Euclidean distance over its last N frames and the winner's
/// subsequent frames are copied out verbatim. Flat scan, ties broken by
/// earliest corpus position.
class NgramIndex {
 public:
  struct Match {
    std::size_t sequence_index = 0;
    std::size_t window_start = 0;
    double distance = std::numeric_limits<double>::infinity();
  };

  struct Continuation {
    std::vector<Vec> frames;
    bool truncated = false;
    Match match;
  };

  /// `distance_dims`: number of leading feature dimensions entering the
  /// match distance (0 = all). Mocap callers pass the angle dimensions so
  /// global deltas stay out of the metric.
  explicit NgramIndex(std::vector<std::vector<Vec>> corpus, std::size_t n = 6,
                      std::size_t distance_dims = 0)
      : corpus_(std::move(corpus)), n_(n), distance_dims_(distance_dims) {
    if (n_ < 1) throw ArgumentError("NgramIndex: n must be >= 1");
    for (const auto& seq : corpus_)
      for (std::size_t start = 0; start + n_ < seq.size(); ++start)
        ++window_count_;
    if (window_count_ == 0)
      throw ArgumentError("NgramIndex: corpus has no length-" +
                          std::to_string(n_) + " windows with continuations");
  }

  std::size_t n() const { return n_; }
  std::size_t window_count() const { return window_count_; }
  const std::vector<std::vector<Vec>>& corpus() const { return corpus_; }

  Match best_match(const std::vector<Vec>& prefix) const {
    if (prefix.size() < n_)
      throw ArgumentError("NgramIndex: prefix shorter than n=" +
                          std::to_string(n_));
    const std::size_t off = prefix.size() - n_;
    Match best;
    for (std::size_t si = 0; si < corpus_.size(); ++si) {
      const auto& seq = corpus_[si];
      for (std::size_t start = 0; start + n_ < seq.size(); ++start) {
        double d2 = 0.0;
        for (std::size_t t = 0; t < n_ && d2 < best.distance; ++t) {
          const Vec& a = prefix[off + t];
          const Vec& b = seq[start + t];
          const std::size_t dims =
              distance_dims_ ? distance_dims_ : a.size();
          if (b.size() < dims)
            throw ShapeError("NgramIndex: corpus frame dimension mismatch");
          for (std::size_t i = 0; i < dims; ++i) {
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

  /// Copies out the `steps` frames following the best-matching window. When
  /// the source sequence ends early the result is truncated and flagged.
  Continuation continue_sequence(const std::vector<Vec>& prefix,
                                 std::size_t steps) const {
    Continuation out;
    out.match = best_match(prefix);
    const auto& seq = corpus_[out.match.sequence_index];
    const std::size_t from = out.match.window_start + n_;
    for (std::size_t t = 0; t < steps && from + t < seq.size(); ++t)
      out.frames.push_back(seq[from + t]);
    out.truncated = out.frames.size() < steps;
    return out;
  }

 private:
  std::vector<std::vector<Vec>> corpus_;
  std::size_t n_;
  std::size_t distance_dims_;
  std::size_t window_count_ = 0;
};

/// The LSTM-3LR comparison model: three LSTM layers with a single linear
/// (identity-activation) layer on each side. Interoperates with every
/// ErdModel operation unchanged.
inline ErdModel make_lstm3lr(std::size_t input_dim, std::size_t units = 1000,
                             OutputHead head = OutputHead::gmm,
                             std::size_t gmm_components = 5) {
  ErdConfig c;
  c.input_dim = input_dim;
  c.encoder_sizes = {units};
  c.lstm_sizes = {units, units, units};
  c.decoder_sizes = {units};
  c.output_head = head;
  c.gmm_components = gmm_components;
  c.hidden_activation = Activation::identity;
  return ErdModel(c);
}

/// Zero-motion forecast: the prediction for time t is the observation at
/// t - H (clamped to the first frame for t < H).
inline Pose2dSequence zero_motion_forecast(const Pose2dSequence& seq,
                                           std::size_t horizon_frames) {
  Pose2dSequence out = seq;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const std::size_t src = t >= horizon_frames ? t - horizon_frames : 0;
    out.frames[t] = seq.frames[src];
  }
  return out;
}

/// Constant-displacement forecast: per joint, the last observed frame-to-
/// frame displacement is extrapolated H frames ahead and clamped to the
/// declared grid bounds. Stands in for a constant-optical-flow model when
/// only joint trajectories are available.
inline Pose2dSequence constant_displacement_forecast(
    const Pose2dSequence& seq, std::size_t horizon_frames) {
  if (seq.frames.size() < 2)
    throw ArgumentError("constant_displacement_forecast: need >= 2 frames");
  Pose2dSequence out = seq;
  const double h = static_cast<double>(horizon_frames);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const std::size_t src = t >= horizon_frames ? t - horizon_frames : 0;
    if (src == 0) {
      out.frames[t] = seq.frames[0];
      continue;
    }
    std::vector<Point2> pred(seq.frames[src].size());
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const Point2& cur = seq.frames[src][j];
      const Point2& prev = seq.frames[src - 1][j];
      Point2 p{cur.x + h * (cur.x - prev.x), cur.y + h * (cur.y - prev.y)};
      if (seq.width > 0.0 && seq.height > 0.0) {
        p.x = std::min(std::max(p.x, 0.0), seq.width - 1.0);
        p.y = std::min(std::max(p.y, 0.0), seq.height - 1.0);
      }
      pred[j] = p;
    }
    out.frames[t] = std::move(pred);
  }
  return out;
}

}  // namespace erd
