#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "erd/matrix.hpp"
#include "erd/random.hpp"

namespace erd {

constexpr double kStdFloor = 1e-8;

/// Kinematic tree metadata. Joint orientations are exponential-map
/// 3-vectors in the parent's coordinate frame.
struct SkeletonSpec {
  std::vector<std::string> joint_names;
  std::vector<int> parent_index;  // -1 for the root
  static constexpr int dof_per_joint = 3;

  void validate() const {
    if (joint_names.size() != parent_index.size())
      throw ArgumentError("SkeletonSpec: names/parents length mismatch");
    int roots = 0;
    for (std::size_t j = 0; j < parent_index.size(); ++j) {
      const int p = parent_index[j];
      if (p == -1) {
        ++roots;
        continue;
      }
      if (p < 0 || static_cast<std::size_t>(p) >= parent_index.size())
        throw ArgumentError("SkeletonSpec: parent index out of range");
      // walk to the root; a cycle would loop longer than the joint count
      std::size_t hops = 0;
      for (int q = p; q != -1; q = parent_index[q])
        if (++hops > parent_index.size())
          throw ArgumentError("SkeletonSpec: cycle in parent indices");
    }
    if (roots != 1) throw ArgumentError("SkeletonSpec: exactly one root required");
  }
};

/// A mocap sequence. Each frame is a flat feature vector:
/// 3 exponential-map values per joint, then the relative global motion
/// (dx, dy in the previous frame's heading frame, dyaw about vertical).
struct MocapSequence {
  std::vector<Vec> frames;
  double frame_rate_hz = 0.0;
  std::vector<std::string> joint_names;

  std::size_t size() const { return frames.size(); }
  std::size_t dim() const { return frames.empty() ? 0 : frames[0].size(); }
  std::size_t joint_count() const { return joint_names.size(); }
  std::size_t angle_dim() const { return 3 * joint_names.size(); }

  void validate() const {
    if (frames.empty()) throw ArgumentError("MocapSequence: no frames");
    if (!(frame_rate_hz > 0.0))
      throw ArgumentError("MocapSequence: frame_rate_hz must be > 0");
    const std::size_t expect = angle_dim() + 3;
    for (std::size_t t = 0; t < frames.size(); ++t) {
      if (frames[t].size() != expect)
        throw ShapeError("MocapSequence: frame " + std::to_string(t) +
                         " has dim " + std::to_string(frames[t].size()) +
                         ", expected " + std::to_string(expect));
      if (!all_finite(frames[t]))
        throw NumericError("MocapSequence: non-finite value in frame " +
                           std::to_string(t));
    }
  }
};

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos != s.size()) throw ParseError(context + ": bad number '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    throw ParseError(context + ": bad number '" + s + "'");
  }
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Mocap CSV: line 1 `frame_rate_hz,<real>`; line 2 comma-separated joint
/// names; line 3+ one frame per line (3*J joint angles, then global_dx,
/// global_dy, global_dyaw).
inline MocapSequence load_mocap(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_mocap: cannot open '" + path + "'");
  MocapSequence seq;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line))
    throw ArgumentError("load_mocap: empty file '" + path + "'");
  ++lineno;
  {
    auto fields = detail::split_csv(line);
    if (fields.size() != 2 || fields[0] != "frame_rate_hz")
      throw ParseError(path + ":1: expected 'frame_rate_hz,<real>'");
    seq.frame_rate_hz =
        detail::parse_double(fields[1], path + ":1");
    if (!(seq.frame_rate_hz > 0.0))
      throw ParseError(path + ":1: frame rate must be > 0");
  }

  if (!std::getline(in, line))
    throw ParseError(path + ":2: missing joint-name line");
  ++lineno;
  seq.joint_names = detail::split_csv(line);
  if (seq.joint_names.empty() ||
      (seq.joint_names.size() == 1 && seq.joint_names[0].empty()))
    throw ParseError(path + ":2: no joint names");

  const std::size_t expect = 3 * seq.joint_names.size() + 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != expect)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(expect) + " values, got " +
                       std::to_string(fields.size()));
    Vec frame(expect);
    for (std::size_t i = 0; i < expect; ++i)
      frame[i] = detail::parse_double(fields[i],
                                      path + ":" + std::to_string(lineno));
    seq.frames.push_back(std::move(frame));
  }
  if (seq.frames.empty())
    throw ArgumentError("load_mocap: '" + path + "' contains no frames");
  seq.validate();
  return seq;
}

inline void write_mocap(const MocapSequence& seq, const std::string& path) {
  seq.validate();
  std::ofstream out(path);
  if (!out) throw ArgumentError("write_mocap: cannot open '" + path + "'");
  out << "frame_rate_hz," << detail::fmt_double(seq.frame_rate_hz) << "\n";
  for (std::size_t j = 0; j < seq.joint_names.size(); ++j)
    out << (j ? "," : "") << seq.joint_names[j];
  out << "\n";
  for (const Vec& f : seq.frames) {
    for (std::size_t i = 0; i < f.size(); ++i)
      out << (i ? "," : "") << detail::fmt_double(f[i]);
    out << "\n";
  }
}

/// Per-dimension whitening statistics. std entries are floored at 1e-8 so a
/// constant dimension standardizes to zero instead of dividing by zero.
struct Standardizer {
  Vec mean, std;

  std::size_t dim() const { return mean.size(); }

  Vec apply(const Vec& x) const {
    if (x.size() != mean.size())
      throw ShapeError("Standardizer::apply: dimension mismatch");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = (x[i] - mean[i]) / std[i];
    return out;
  }

  Vec invert(const Vec& x) const {
    if (x.size() != mean.size())
      throw ShapeError("Standardizer::invert: dimension mismatch");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = x[i] * std[i] + mean[i];
    return out;
  }
};

/// Population mean/std over every frame of every sequence.
inline Standardizer fit_standardizer_frames(
    const std::vector<const std::vector<Vec>*>& seqs) {
  std::size_t total = 0, dim = 0;
  for (const auto* s : seqs) {
    total += s->size();
    if (!s->empty()) dim = (*s)[0].size();
  }
  if (total < 2)
    throw ArgumentError("fit_standardizer: need at least 2 frames");
  Standardizer st;
  st.mean.assign(dim, 0.0);
  st.std.assign(dim, 0.0);
  for (const auto* s : seqs)
    for (const Vec& f : *s) {
      if (f.size() != dim)
        throw ShapeError("fit_standardizer: inconsistent dimensions");
      for (std::size_t i = 0; i < dim; ++i) st.mean[i] += f[i];
    }
  for (double& m : st.mean) m /= static_cast<double>(total);
  for (const auto* s : seqs)
    for (const Vec& f : *s)
      for (std::size_t i = 0; i < dim; ++i) {
        const double d = f[i] - st.mean[i];
        st.std[i] += d * d;
      }
  for (double& v : st.std) {
    v = std::sqrt(v / static_cast<double>(total));
    if (v < kStdFloor) v = kStdFloor;
  }
  return st;
}

inline Standardizer fit_standardizer(const std::vector<MocapSequence>& seqs) {
  std::vector<const std::vector<Vec>*> ptrs;
  ptrs.reserve(seqs.size());
  for (const auto& s : seqs) ptrs.push_back(&s.frames);
  return fit_standardizer_frames(ptrs);
}

inline std::vector<Vec> standardize_frames(const std::vector<Vec>& frames,
                                           const Standardizer& s) {
  std::vector<Vec> out;
  out.reserve(frames.size());
  for (const Vec& f : frames) out.push_back(s.apply(f));
  return out;
}

inline std::vector<Vec> destandardize_frames(const std::vector<Vec>& frames,
                                             const Standardizer& s) {
  std::vector<Vec> out;
  out.reserve(frames.size());
  for (const Vec& f : frames) out.push_back(s.invert(f));
  return out;
}

inline MocapSequence standardize(const MocapSequence& seq,
                                 const Standardizer& s) {
  MocapSequence out = seq;
  out.frames = standardize_frames(seq.frames, s);
  return out;
}

inline MocapSequence destandardize(const MocapSequence& seq,
                                   const Standardizer& s) {
  MocapSequence out = seq;
  out.frames = destandardize_frames(seq.frames, s);
  return out;
}

// -- relative global motion ---------------------------------------------------

struct GlobalPose {
  double x = 0.0, y = 0.0, yaw = 0.0;
};

struct GlobalDelta {
  double dx = 0.0, dy = 0.0, dyaw = 0.0;
};

/// Absolute planar trajectory -> per-frame deltas in the previous frame's
/// heading frame. delta[0] is zero by convention.
inline std::vector<GlobalDelta> to_relative_global(
    const std::vector<GlobalPose>& absolute) {
  if (absolute.size() < 2)
    throw ArgumentError("to_relative_global: need at least 2 frames");
  std::vector<GlobalDelta> deltas(absolute.size());
  for (std::size_t t = 1; t < absolute.size(); ++t) {
    const GlobalPose& prev = absolute[t - 1];
    const GlobalPose& cur = absolute[t];
    const double wx = cur.x - prev.x;
    const double wy = cur.y - prev.y;
    const double c = std::cos(prev.yaw), s = std::sin(prev.yaw);
    deltas[t].dx = c * wx + s * wy;
    deltas[t].dy = -s * wx + c * wy;
    deltas[t].dyaw = cur.yaw - prev.yaw;
  }
  return deltas;
}

/// Inverse of to_relative_global given the true initial pose. deltas[0] is
/// ignored; pose[0] == initial.
inline std::vector<GlobalPose> integrate_global(
    const std::vector<GlobalDelta>& deltas, const GlobalPose& initial) {
  std::vector<GlobalPose> out(deltas.size());
  if (deltas.empty()) return out;
  out[0] = initial;
  for (std::size_t t = 1; t < deltas.size(); ++t) {
    const GlobalPose& prev = out[t - 1];
    const double c = std::cos(prev.yaw), s = std::sin(prev.yaw);
    out[t].x = prev.x + c * deltas[t].dx - s * deltas[t].dy;
    out[t].y = prev.y + s * deltas[t].dx + c * deltas[t].dy;
    out[t].yaw = prev.yaw + deltas[t].dyaw;
  }
  return out;
}

/// Keeps every factor-th frame starting at index 0 and divides the frame
/// rate. Global deltas are recomposed over the larger step (rotations
/// composed, translations accumulated in the step's start heading frame), so
/// integrating the subsampled deltas still reproduces the original absolute
/// trajectory at the kept frames.
inline MocapSequence subsample(const MocapSequence& seq, std::size_t factor) {
  if (factor < 1) throw ArgumentError("subsample: factor must be >= 1");
  if (factor == 1) return seq;
  seq.validate();
  const std::size_t ad = seq.angle_dim();
  MocapSequence out;
  out.joint_names = seq.joint_names;
  out.frame_rate_hz = seq.frame_rate_hz / static_cast<double>(factor);
  for (std::size_t t = 0; t < seq.frames.size(); t += factor) {
    Vec frame = seq.frames[t];
    if (t > 0) {
      // compose the deltas of the skipped span (t-factor, t]
      double x = 0.0, y = 0.0, yaw = 0.0;
      for (std::size_t u = t - factor + 1; u <= t; ++u) {
        const Vec& f = seq.frames[u];
        const double c = std::cos(yaw), s = std::sin(yaw);
        x += c * f[ad] - s * f[ad + 1];
        y += s * f[ad] + c * f[ad + 1];
        yaw += f[ad + 2];
      }
      frame[ad] = x;
      frame[ad + 1] = y;
      frame[ad + 2] = yaw;
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

// -- denoising curriculum ------------------------------------------------------

/// Adds i.i.d. N(0, sigma^2) to every feature of a (standardized) frame.
inline Vec corrupt(const Vec& frame, double sigma, RandomStream& rng) {
  if (sigma < 0.0) throw ArgumentError("corrupt: sigma must be >= 0");
  if (sigma == 0.0) return frame;
  Vec out = frame;
  for (double& v : out) v += sigma * rng.normal();
  return out;
}

/// Linear ramp from 0 at epoch 0 up to sigma_max at ramp_fraction of
/// training, constant afterwards: uncorrupted examples come first, then the
/// noise level grows.
struct NoiseSchedule {
  double sigma_max = 0.1;     // standardized units
  double ramp_fraction = 0.5; // in (0, 1]
};

inline double noise_sigma(const NoiseSchedule& sched, std::size_t epoch,
                          std::size_t total_epochs) {
  if (epoch >= total_epochs)
    throw ArgumentError("noise_sigma: epoch out of range");
  if (sched.sigma_max < 0.0)
    throw ArgumentError("noise_sigma: sigma_max must be >= 0");
  if (!(sched.ramp_fraction > 0.0) || sched.ramp_fraction > 1.0)
    throw ArgumentError("noise_sigma: ramp_fraction must be in (0, 1]");
  const double ramp_end = sched.ramp_fraction * static_cast<double>(total_epochs);
  if (ramp_end <= 0.0) return sched.sigma_max;
  const double f = static_cast<double>(epoch) / ramp_end;
  return sched.sigma_max * (f < 1.0 ? f : 1.0);
}

// -- windowing -----------------------------------------------------------------

/// A truncated-BPTT window: inputs are frames [t, t+L), targets the frames
/// shifted by one, [t+1, t+L].
struct Window {
  std::vector<Vec> inputs, targets;
};

inline std::vector<Window> make_windows(const std::vector<Vec>& frames,
                                        std::size_t window_len,
                                        std::size_t stride) {
  if (window_len < 1) throw ArgumentError("make_windows: window_len must be >= 1");
  if (stride < 1) throw ArgumentError("make_windows: stride must be >= 1");
  if (frames.size() < window_len + 1)
    throw ArgumentError("make_windows: sequence length " +
                        std::to_string(frames.size()) +
                        " too short for window " + std::to_string(window_len));
  std::vector<Window> out;
  for (std::size_t t = 0; t + window_len + 1 <= frames.size(); t += stride) {
    Window w;
    w.inputs.assign(frames.begin() + t, frames.begin() + t + window_len);
    w.targets.assign(frames.begin() + t + 1, frames.begin() + t + window_len + 1);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace erd
