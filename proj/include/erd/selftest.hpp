#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "erd/baselines.hpp"
#include "erd/checkpoint.hpp"
#include "erd/gradcheck.hpp"
#include "erd/model.hpp"
#include "erd/reference.hpp"
#include "erd/synthetic.hpp"

namespace erd {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct SelftestOptions {
  // Negative-control hook: perturb the analytic gradient of the named
  // parameter so the gradient check must fail and name it.
  std::string inject_gradient_fault;
};

namespace detail {

inline GradCheckResult check_model_gradients(ErdModel& model, std::size_t t_len,
                                             std::uint64_t seed,
                                             const std::string& fault) {
  RandomStream init = RandomStream::derive(seed, stream::init);
  model.init_weights(init);
  RandomStream data(seed + 17);
  std::vector<Vec> inputs(t_len, Vec(model.config().input_dim));
  std::vector<Vec> targets(t_len, Vec(model.config().output_dim()));
  for (auto& v : inputs)
    for (double& x : v) x = data.normal();
  for (auto& v : targets)
    for (double& x : v) x = data.normal();

  auto loss = [&]() {
    auto raw = model.forward(inputs);
    return model.sequence_loss(raw, targets, true);
  };
  auto named = model.named_parameters();
  auto compute_analytic = [&]() {
    for (auto& np : named) np.param->zero_grad();
    Tape tape;
    auto raw = model.forward(inputs, &tape);
    std::vector<Vec> grads;
    model.sequence_loss(raw, targets, true, &grads);
    model.backward(tape, grads);
    if (!fault.empty())
      for (auto& np : named)
        if (np.name == fault) np.param->grad.values()[0] += 0.1;
  };
  return finite_difference_check(named, loss, compute_analytic, 1e-4);
}

}  // namespace detail

/// Deterministic health checks: analytic gradients against finite
/// differences, optimized paths against reference implementations, and the
/// file-format round trips. Runs in seconds.
inline SelftestReport run_selftest(const SelftestOptions& opt = {}) {
  SelftestReport report;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back({name, pass, detail});
  };

  // 1. gradient checks on a micro ERD and the LSTM-3LR micro variant
  {
    ErdConfig c;
    c.input_dim = 4;
    c.encoder_sizes = {6};
    c.lstm_sizes = {6};
    c.decoder_sizes = {6};
    c.output_head = OutputHead::gmm;
    c.gmm_components = 2;
    ErdModel model(c);
    auto r = detail::check_model_gradients(model, 8, 11,
                                           opt.inject_gradient_fault);
    add("gradients.erd_micro", r.max_rel_error < 1e-4,
        "max rel err " + std::to_string(r.max_rel_error) +
            (r.max_rel_error >= 1e-4 ? " at " + r.worst_parameter : ""));
  }
  {
    ErdModel model = make_lstm3lr(4, 5, OutputHead::gmm, 2);
    auto r = detail::check_model_gradients(model, 8, 12,
                                           opt.inject_gradient_fault);
    add("gradients.lstm3lr_micro", r.max_rel_error < 1e-4,
        "max rel err " + std::to_string(r.max_rel_error) +
            (r.max_rel_error >= 1e-4 ? " at " + r.worst_parameter : ""));
  }

  // 2. GMM log-sum-exp path vs naive density sum
  {
    RandomStream rng(21);
    double worst = 0.0;
    for (int it = 0; it < 200; ++it) {
      const std::size_t k = 1 + rng.index(4), d = 1 + rng.index(6);
      GmmParams g;
      g.weights.assign(k, 0.0);
      double z = 0.0;
      for (auto& w : g.weights) z += (w = rng.uniform(0.1, 1.0));
      for (auto& w : g.weights) w /= z;
      g.means = Matrix(k, d);
      g.variances = Matrix(k, d);
      for (auto& v : g.means.values()) v = rng.normal();
      for (auto& v : g.variances.values()) v = rng.uniform(0.2, 2.0);
      Vec target(d);
      for (auto& v : target) v = rng.normal();
      worst = std::max(worst, std::fabs(gmm_nll(g, target) -
                                        reference::gmm_nll_naive(g, target)));
    }
    add("gmm.nll_vs_naive", worst < 1e-10,
        "max abs diff " + std::to_string(worst));
  }

  // 3. Viterbi DP vs exhaustive enumeration
  {
    RandomStream rng(31);
    bool ok = true;
    std::string detail_msg = "40 random instances";
    for (int it = 0; it < 40 && ok; ++it) {
      const std::size_t n = 2 + rng.index(2), t_len = 2 + rng.index(3);
      HeatMapSequence seq(t_len);
      for (auto& s : seq) {
        s.joints = 1;
        s.side = n;
        s.maps.assign(1, Matrix(n, n));
        for (auto& v : s.maps[0].values()) v = rng.uniform(0.0, 2.0);
      }
      const double scale = rng.uniform(0.3, 2.0);
      auto pose = viterbi_smooth(seq, scale);
      std::vector<const Matrix*> unaries;
      for (const auto& s : seq) unaries.push_back(&s.maps[0]);
      auto brute = reference::viterbi_bruteforce_joint(unaries, scale);
      std::vector<std::size_t> dp_states;
      for (const auto& f : pose.frames)
        dp_states.push_back(static_cast<std::size_t>(f[0].y) * n +
                            static_cast<std::size_t>(f[0].x));
      const double dp_obj =
          reference::viterbi_objective(unaries, dp_states, scale);
      if (std::fabs(dp_obj - brute.objective) > 1e-9 ||
          dp_states != brute.states) {
        ok = false;
        detail_msg = "mismatch at instance " + std::to_string(it);
      }
    }
    add("viterbi.dp_vs_bruteforce", ok, detail_msg);
  }

  // 4. N-gram exactness on corpus-lifted prefixes
  {
    SinusoidSpec spec;
    spec.dims = 6;
    spec.frames = 60;
    auto corpus = make_sinusoid_corpus(4, spec, 41);
    NgramIndex index(corpus, 6);
    RandomStream rng(42);
    bool ok = true;
    for (int it = 0; it < 25 && ok; ++it) {
      const std::size_t si = rng.index(corpus.size());
      const std::size_t start = rng.index(corpus[si].size() - 12);
      std::vector<Vec> prefix(corpus[si].begin() + start,
                              corpus[si].begin() + start + 8);
      auto cont = index.continue_sequence(prefix, 3);
      if (cont.match.distance > 1e-12 ||
          cont.frames[0] != corpus[si][start + 8])
        ok = false;
    }
    add("ngram.exact_lift", ok, "25 random corpus lifts");
  }

  // 5. round trips: standardizer, global deltas, mocap CSV, checkpoint
  {
    RandomStream rng(51);
    SinusoidSpec spec;
    spec.dims = 9;
    spec.frames = 40;
    auto frames = make_sinusoid_sequence(spec, rng);
    auto st = fit_standardizer_frames({&frames});
    double worst = 0.0;
    for (const auto& f : frames) {
      Vec back = st.invert(st.apply(f));
      for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::fabs(back[i] - f[i]));
    }
    add("roundtrip.standardize", worst < 1e-9,
        "max abs deviation " + std::to_string(worst));
  }
  {
    RandomStream rng(52);
    std::vector<GlobalPose> traj(50);
    for (std::size_t t = 1; t < traj.size(); ++t) {
      traj[t].x = traj[t - 1].x + rng.uniform(-0.1, 0.2);
      traj[t].y = traj[t - 1].y + rng.uniform(-0.1, 0.2);
      traj[t].yaw = traj[t - 1].yaw + rng.uniform(-0.05, 0.05);
    }
    auto deltas = to_relative_global(traj);
    auto back = integrate_global(deltas, traj[0]);
    double worst = 0.0;
    for (std::size_t t = 0; t < traj.size(); ++t)
      worst = std::max({worst, std::fabs(back[t].x - traj[t].x),
                        std::fabs(back[t].y - traj[t].y),
                        std::fabs(back[t].yaw - traj[t].yaw)});
    add("roundtrip.global_motion", worst < 1e-9,
        "max abs deviation " + std::to_string(worst));
  }
  {
    namespace fs = std::filesystem;
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path dir =
        fs::temp_directory_path() / ("erd-selftest-" + std::to_string(stamp));
    fs::create_directories(dir);
    RandomStream rng(53);
    MocapSequence seq = make_synthetic_mocap(4, 20, 25.0, rng);
    const std::string csv = (dir / "roundtrip.csv").string();
    write_mocap(seq, csv);
    MocapSequence loaded = load_mocap(csv);
    bool ok = loaded.frames == seq.frames &&
              loaded.frame_rate_hz == seq.frame_rate_hz &&
              loaded.joint_names == seq.joint_names;
    add("roundtrip.mocap_csv", ok, csv);

    ErdConfig c;
    c.input_dim = seq.dim();
    c.encoder_sizes = {8};
    c.lstm_sizes = {8};
    c.decoder_sizes = {8};
    c.gmm_components = 2;
    ErdModel model(c);
    RandomStream init = RandomStream::derive(7, stream::init);
    model.init_weights(init);
    Standardizer st = fit_standardizer({seq});
    const std::string ck = (dir / "roundtrip.ckpt.json").string();
    save_checkpoint(model, st, ck);
    Checkpoint loaded_ck = load_checkpoint(ck);
    bool bits_equal = true;
    auto a = model.named_parameters();
    auto b = loaded_ck.model.named_parameters();
    for (std::size_t i = 0; i < a.size() && bits_equal; ++i)
      bits_equal = a[i].param->value.values() == b[i].param->value.values();
    add("roundtrip.checkpoint", bits_equal && loaded_ck.standardizer.mean == st.mean,
        ck);
    fs::remove_all(dir);
  }

  return report;
}

}  // namespace erd
