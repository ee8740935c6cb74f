#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "erd/errors.hpp"

namespace erd {

struct Point2 {
  double x = 0.0, y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Per-frame 2D joint locations in grid (cell) or pixel coordinates.
/// width/height of 0 means unbounded; otherwise coordinates live in
/// [0, width-1] x [0, height-1].
struct Pose2dSequence {
  std::vector<std::vector<Point2>> frames;
  double width = 0.0, height = 0.0;

  std::size_t size() const { return frames.size(); }
  std::size_t joint_count() const {
    return frames.empty() ? 0 : frames[0].size();
  }

  void validate() const {
    const std::size_t k = joint_count();
    for (std::size_t t = 0; t < frames.size(); ++t) {
      if (frames[t].size() != k)
        throw ShapeError("Pose2dSequence: frame " + std::to_string(t) +
                         " joint count mismatch");
      if (width > 0.0 && height > 0.0)
        for (const Point2& p : frames[t])
          if (p.x < 0.0 || p.x > width - 1.0 || p.y < 0.0 || p.y > height - 1.0)
            throw ArgumentError("Pose2dSequence: coordinate out of bounds in frame " +
                                std::to_string(t));
    }
  }
};

/// Pose CSV: line 1 `joints,<int>`; then one frame per line with 2K reals
/// (x, y per joint).
inline Pose2dSequence load_pose2d(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_pose2d: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ArgumentError("load_pose2d: empty file '" + path + "'");
  std::size_t joints = 0;
  {
    const auto pos = line.find(',');
    if (pos == std::string::npos || line.substr(0, pos) != "joints")
      throw ParseError(path + ":1: expected 'joints,<int>'");
    try {
      joints = static_cast<std::size_t>(std::stoul(line.substr(pos + 1)));
    } catch (...) {
      throw ParseError(path + ":1: expected 'joints,<int>'");
    }
    if (joints == 0) throw ParseError(path + ":1: joint count must be >= 1");
  }
  Pose2dSequence seq;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<Point2> frame;
    frame.reserve(joints);
    std::size_t start = 0, count = 0;
    std::vector<double> vals;
    while (start <= line.size()) {
      auto end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      try {
        vals.push_back(std::stod(line.substr(start, end - start)));
      } catch (...) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" +
                         line.substr(start, end - start) + "'");
      }
      ++count;
      start = end + 1;
    }
    if (count != 2 * joints)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(2 * joints) + " values, got " +
                       std::to_string(count));
    for (std::size_t j = 0; j < joints; ++j)
      frame.push_back({vals[2 * j], vals[2 * j + 1]});
    seq.frames.push_back(std::move(frame));
  }
  if (seq.frames.empty())
    throw ArgumentError("load_pose2d: '" + path + "' contains no frames");
  return seq;
}

inline void write_pose2d(const Pose2dSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("write_pose2d: cannot open '" + path + "'");
  out << "joints," << seq.joint_count() << "\n";
  char buf[64];
  for (const auto& frame : seq.frames) {
    for (std::size_t j = 0; j < frame.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", frame[j].x, frame[j].y);
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace erd
