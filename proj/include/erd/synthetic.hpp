#pragma once

#include <string>
#include <vector>

#include "erd/mocap.hpp"
#include "erd/random.hpp"

namespace erd {

/// Synthetic dynamics for experiments and demos: every feature dimension is
/// a sum of two sinusoids with phases drawn independently per sequence and
/// dimension.
struct SinusoidSpec {
  std::size_t dims = 20;
  std::size_t frames = 500;
  double frame_rate_hz = 25.0;
  double freq1_hz = 0.8;
  double freq2_hz = 1.9;
  double amp1 = 1.0;
  double amp2 = 0.5;
};

inline std::vector<Vec> make_sinusoid_sequence(const SinusoidSpec& spec,
                                               RandomStream& rng) {
  constexpr double two_pi = 6.28318530717958647692;
  std::vector<double> phase1(spec.dims), phase2(spec.dims);
  for (std::size_t d = 0; d < spec.dims; ++d) {
    phase1[d] = rng.uniform(0.0, two_pi);
    phase2[d] = rng.uniform(0.0, two_pi);
  }
  std::vector<Vec> frames(spec.frames, Vec(spec.dims));
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const double time = static_cast<double>(t) / spec.frame_rate_hz;
    for (std::size_t d = 0; d < spec.dims; ++d)
      frames[t][d] =
          spec.amp1 * std::sin(two_pi * spec.freq1_hz * time + phase1[d]) +
          spec.amp2 * std::sin(two_pi * spec.freq2_hz * time + phase2[d]);
  }
  return frames;
}

inline std::vector<std::vector<Vec>> make_sinusoid_corpus(
    std::size_t sequences, const SinusoidSpec& spec, std::uint64_t seed) {
  RandomStream rng = RandomStream::derive(seed, stream::data);
  std::vector<std::vector<Vec>> out;
  out.reserve(sequences);
  for (std::size_t s = 0; s < sequences; ++s)
    out.push_back(make_sinusoid_sequence(spec, rng));
  return out;
}

/// A sinusoid corpus wrapped as valid mocap sequences (J joints, plus global
/// deltas from a slow constant turn) so the CLI pipeline can be exercised
/// without licensed capture data.
inline MocapSequence make_synthetic_mocap(std::size_t joints,
                                          std::size_t frames,
                                          double frame_rate_hz,
                                          RandomStream& rng) {
  SinusoidSpec spec;
  spec.dims = 3 * joints;
  spec.frames = frames;
  spec.frame_rate_hz = frame_rate_hz;
  auto angles = make_sinusoid_sequence(spec, rng);

  MocapSequence seq;
  seq.frame_rate_hz = frame_rate_hz;
  for (std::size_t j = 0; j < joints; ++j)
    seq.joint_names.push_back("joint" + std::to_string(j));
  const double speed = rng.uniform(0.5, 1.5);           // units per second
  const double turn = rng.uniform(-0.3, 0.3);           // rad per second
  for (std::size_t t = 0; t < frames; ++t) {
    Vec f = angles[t];
    f.push_back(t == 0 ? 0.0 : speed / frame_rate_hz);  // dx in heading frame
    f.push_back(0.0);                                   // dy
    f.push_back(t == 0 ? 0.0 : turn / frame_rate_hz);   // dyaw
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace erd
