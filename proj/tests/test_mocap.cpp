#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "erd/mocap.hpp"
#include "erd/synthetic.hpp"

using namespace erd;

namespace {
namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << text;
  return p;
}
}  // namespace

TEST_CASE("load_mocap parses a literal two-joint file") {
  auto p = write_temp("erd_mocap_lit.csv",
                      "frame_rate_hz,50\n"
                      "hip,knee\n"
                      "0.1,0.2,0.3,0.4,0.5,0.6,0.01,0.02,0.03\n"
                      "1.1,1.2,1.3,1.4,1.5,1.6,0.04,0.05,0.06\n");
  MocapSequence seq = load_mocap(p.string());
  fs::remove(p);
  CHECK(seq.frame_rate_hz == 50.0);
  REQUIRE(seq.joint_names == std::vector<std::string>{"hip", "knee"});
  REQUIRE(seq.size() == 2);
  CHECK(seq.frames[0] == Vec{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.01, 0.02, 0.03});
  CHECK(seq.frames[1][8] == 0.06);
  CHECK(seq.angle_dim() == 6);
}

TEST_CASE("mocap CSV write/load round-trips values exactly") {
  RandomStream rng(171);
  MocapSequence seq = make_synthetic_mocap(5, 30, 25.0, rng);
  const fs::path p = fs::temp_directory_path() / "erd_mocap_rt.csv";
  write_mocap(seq, p.string());
  MocapSequence loaded = load_mocap(p.string());
  fs::remove(p);
  CHECK(loaded.frame_rate_hz == seq.frame_rate_hz);
  CHECK(loaded.joint_names == seq.joint_names);
  REQUIRE(loaded.size() == seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t)
    CHECK(loaded.frames[t] == seq.frames[t]);  // %.17g round-trips exactly
}

TEST_CASE("load_mocap names the offending line on a bad row") {
  auto p = write_temp("erd_mocap_bad.csv",
                      "frame_rate_hz,50\n"
                      "hip\n"
                      "0.1,0.2,0.3,0,0,0\n"
                      "0.1,0.2,0.3,0,0\n");
  try {
    load_mocap(p.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":4") != std::string::npos);
  }
  fs::remove(p);
}

TEST_CASE("load_mocap rejects an empty file") {
  auto p = write_temp("erd_mocap_empty.csv", "");
  CHECK_THROWS_AS(load_mocap(p.string()), ArgumentError);
  fs::remove(p);
}

TEST_CASE("skeleton validation accepts trees and rejects cycles") {
  SkeletonSpec ok;
  ok.joint_names = {"root", "hip", "knee"};
  ok.parent_index = {-1, 0, 1};
  CHECK_NOTHROW(ok.validate());

  SkeletonSpec two_roots = ok;
  two_roots.parent_index = {-1, -1, 1};
  CHECK_THROWS_AS(two_roots.validate(), ArgumentError);

  SkeletonSpec cycle = ok;
  cycle.parent_index = {-1, 2, 1};
  CHECK_THROWS_AS(cycle.validate(), ArgumentError);

  SkeletonSpec ragged = ok;
  ragged.parent_index = {-1, 0};
  CHECK_THROWS_AS(ragged.validate(), ArgumentError);
}

TEST_CASE("standardizer matches the hand-computed two-frame case") {
  std::vector<Vec> frames = {{0.0}, {2.0}};
  auto st = fit_standardizer_frames({&frames});
  CHECK(st.mean[0] == Approx(1.0));
  CHECK(st.std[0] == Approx(1.0));  // population std
}

TEST_CASE("constant dimensions are floored, standardized values zero") {
  std::vector<Vec> frames = {{3.0, 1.0}, {3.0, 2.0}, {3.0, 3.0}};
  auto st = fit_standardizer_frames({&frames});
  CHECK(st.std[0] == kStdFloor);
  Vec z = st.apply({3.0, 2.0});
  CHECK(z[0] == 0.0);
}

TEST_CASE("standardizing an already-whitened set is idempotent") {
  RandomStream rng(173);
  std::vector<Vec> frames(200, Vec(4));
  for (auto& f : frames)
    for (auto& v : f) v = rng.normal() * 3.0 + 1.0;
  auto st = fit_standardizer_frames({&frames});
  auto white = standardize_frames(frames, st);
  auto st2 = fit_standardizer_frames({&white});
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::fabs(st2.mean[i]) < 1e-10);
    CHECK(st2.std[i] == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("standardize/destandardize are inverse within 1e-9") {
  RandomStream rng(179);
  std::vector<Vec> frames(50, Vec(6));
  for (auto& f : frames)
    for (auto& v : f) v = rng.uniform(-10.0, 10.0);
  auto st = fit_standardizer_frames({&frames});
  auto back = destandardize_frames(standardize_frames(frames, st), st);
  for (std::size_t t = 0; t < frames.size(); ++t)
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(back[t][i] == Approx(frames[t][i]).margin(1e-9));
}

TEST_CASE("standardizer rejects dimension mismatches and tiny sets") {
  std::vector<Vec> one = {{1.0}};
  CHECK_THROWS_AS(fit_standardizer_frames({&one}), ArgumentError);
  Standardizer st;
  st.mean = {0.0, 0.0};
  st.std = {1.0, 1.0};
  CHECK_THROWS_AS(st.apply({1.0}), ShapeError);
}

TEST_CASE("stationary body yields zero deltas") {
  std::vector<GlobalPose> traj(5, GlobalPose{2.0, -1.0, 0.7});
  auto deltas = to_relative_global(traj);
  for (const auto& d : deltas) {
    CHECK(d.dx == Approx(0.0).margin(1e-15));
    CHECK(d.dy == Approx(0.0).margin(1e-15));
    CHECK(d.dyaw == 0.0);
  }
}

TEST_CASE("constant forward velocity maps to dx = v / rate") {
  const double v = 2.0, rate = 25.0;
  std::vector<GlobalPose> traj(10);
  for (std::size_t t = 0; t < traj.size(); ++t)
    traj[t] = {v * static_cast<double>(t) / rate, 0.0, 0.0};
  auto deltas = to_relative_global(traj);
  for (std::size_t t = 1; t < deltas.size(); ++t) {
    CHECK(deltas[t].dx == Approx(v / rate));
    CHECK(deltas[t].dy == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("global delta round trip on a smooth random trajectory") {
  RandomStream rng(181);
  std::vector<GlobalPose> traj(100);
  for (std::size_t t = 1; t < traj.size(); ++t) {
    traj[t].x = traj[t - 1].x + rng.uniform(-0.2, 0.3);
    traj[t].y = traj[t - 1].y + rng.uniform(-0.2, 0.3);
    traj[t].yaw = traj[t - 1].yaw + rng.uniform(-0.1, 0.1);
  }
  auto back = integrate_global(to_relative_global(traj), traj[0]);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    CHECK(back[t].x == Approx(traj[t].x).margin(1e-9));
    CHECK(back[t].y == Approx(traj[t].y).margin(1e-9));
    CHECK(back[t].yaw == Approx(traj[t].yaw).margin(1e-9));
  }
}

TEST_CASE("single-frame delta computation is rejected") {
  CHECK_THROWS_AS(to_relative_global({GlobalPose{}}), ArgumentError);
}

TEST_CASE("subsample keeps frame 0 and every factor-th frame") {
  RandomStream rng(191);
  MocapSequence seq = make_synthetic_mocap(2, 10, 50.0, rng);
  MocapSequence half = subsample(seq, 2);
  REQUIRE(half.size() == 5);
  CHECK(half.frame_rate_hz == 25.0);
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t i = 0; i < seq.angle_dim(); ++i)
      CHECK(half.frames[k][i] == seq.frames[2 * k][i]);

  CHECK(subsample(seq, 1).frames == seq.frames);
  CHECK_THROWS_AS(subsample(seq, 0), ArgumentError);
}

TEST_CASE("subsampling doubles constant-velocity deltas") {
  MocapSequence seq;
  seq.frame_rate_hz = 50.0;
  seq.joint_names = {"j0"};
  for (int t = 0; t < 8; ++t)
    seq.frames.push_back({0.0, 0.0, 0.0, t == 0 ? 0.0 : 0.1, 0.0, 0.0});
  MocapSequence half = subsample(seq, 2);
  for (std::size_t k = 1; k < half.size(); ++k)
    CHECK(half.frames[k][3] == Approx(0.2));
}

TEST_CASE("subsampled deltas still integrate to the original trajectory") {
  RandomStream rng(193);
  MocapSequence seq = make_synthetic_mocap(2, 30, 50.0, rng);
  const std::size_t ad = seq.angle_dim();
  auto deltas_of = [&](const MocapSequence& s) {
    std::vector<GlobalDelta> d(s.size());
    for (std::size_t t = 0; t < s.size(); ++t)
      d[t] = {s.frames[t][ad], s.frames[t][ad + 1], s.frames[t][ad + 2]};
    return d;
  };
  auto full = integrate_global(deltas_of(seq), GlobalPose{});
  auto half = integrate_global(deltas_of(subsample(seq, 2)), GlobalPose{});
  for (std::size_t k = 0; k < half.size(); ++k) {
    CHECK(half[k].x == Approx(full[2 * k].x).margin(1e-9));
    CHECK(half[k].y == Approx(full[2 * k].y).margin(1e-9));
    CHECK(half[k].yaw == Approx(full[2 * k].yaw).margin(1e-9));
  }
}

TEST_CASE("corrupt: zero sigma is the identity, fixed seed repeats") {
  Vec frame = {1.0, -2.0, 3.0};
  RandomStream a(7);
  CHECK(corrupt(frame, 0.0, a) == frame);
  RandomStream b1(7), b2(7);
  CHECK(corrupt(frame, 0.3, b1) == corrupt(frame, 0.3, b2));
  CHECK_THROWS_AS(corrupt(frame, -0.1, a), ArgumentError);
}

TEST_CASE("corruption noise has the requested standard deviation") {
  RandomStream rng(197);
  const double sigma = 0.1;
  Vec frame(3, 0.0);
  double sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Vec c = corrupt(frame, sigma, rng);
    for (double v : c) sq += v * v;
  }
  const double emp = std::sqrt(sq / (3.0 * n));
  CHECK(emp == Approx(sigma).epsilon(0.03));
}

TEST_CASE("noise schedule: zero at epoch 0, linear ramp, plateau") {
  NoiseSchedule sched{0.1, 0.5};
  CHECK(noise_sigma(sched, 0, 100) == 0.0);
  CHECK(noise_sigma(sched, 25, 100) == Approx(0.05));
  CHECK(noise_sigma(sched, 50, 100) == Approx(0.1));
  CHECK(noise_sigma(sched, 99, 100) == Approx(0.1));
  CHECK_THROWS_AS(noise_sigma(sched, 100, 100), ArgumentError);

  // nondecreasing in epoch
  double prev = -1.0;
  for (std::size_t e = 0; e < 100; ++e) {
    const double s = noise_sigma(sched, e, 100);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("window construction indices and counts") {
  std::vector<Vec> frames;
  for (int t = 0; t < 5; ++t) frames.push_back({static_cast<double>(t)});
  auto ws = make_windows(frames, 2, 2);
  REQUIRE(ws.size() == 2);
  CHECK(ws[0].inputs[0][0] == 0.0);
  CHECK(ws[1].inputs[0][0] == 2.0);
  // targets shifted by one from inputs
  for (const auto& w : ws)
    for (std::size_t t = 0; t < w.inputs.size(); ++t)
      CHECK(w.targets[t][0] == w.inputs[t][0] + 1.0);

  // stride 1: N - L windows
  for (std::size_t len : {3u, 8u, 20u}) {
    std::vector<Vec> fr(len, Vec{0.0});
    for (std::size_t t = 0; t < len; ++t) fr[t][0] = static_cast<double>(t);
    const std::size_t window = 2;
    CHECK(make_windows(fr, window, 1).size() == len - window);
  }
  CHECK_THROWS_AS(make_windows(frames, 5, 1), ArgumentError);
}
