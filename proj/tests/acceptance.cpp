// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion; exit code 0 iff all pass.
//
// The two training-based criteria (5 and 6) dominate the runtime; everything
// else completes in seconds. All runs are seeded and bit-deterministic.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "erd/baselines.hpp"
#include "erd/checkpoint.hpp"
#include "erd/eval.hpp"
#include "erd/gradcheck.hpp"
#include "erd/model.hpp"
#include "erd/reference.hpp"
#include "erd/synthetic.hpp"
#include "erd/training.hpp"

using namespace erd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// -- shared experiment setup (criteria 5 and 6) -------------------------------

struct SyntheticWorld {
  std::vector<std::vector<Vec>> train_corpus, test_corpus;
  Standardizer standardizer;
  std::vector<std::vector<Vec>> train_std;
};

SyntheticWorld make_world() {
  SyntheticWorld w;
  SinusoidSpec spec;  // 20 dims, 500 frames, 25 Hz, two sinusoids per dim
  w.train_corpus = make_sinusoid_corpus(20, spec, 1001);
  w.test_corpus = make_sinusoid_corpus(4, spec, 2002);
  std::vector<const std::vector<Vec>*> ptrs;
  for (auto& s : w.train_corpus) ptrs.push_back(&s);
  w.standardizer = fit_standardizer_frames(ptrs);
  for (auto& s : w.train_corpus)
    w.train_std.push_back(standardize_frames(s, w.standardizer));
  return w;
}

ErdConfig desk_config() {
  ErdConfig c;
  c.input_dim = 20;
  c.encoder_sizes = {64, 64};
  c.lstm_sizes = {128};
  c.decoder_sizes = {64, 64};
  c.output_head = OutputHead::gmm;
  c.gmm_components = 5;
  return c;
}

ErdModel train_desk_model(const SyntheticWorld& w, std::uint64_t seed,
                          double sigma_max, std::size_t epochs) {
  ErdModel model(desk_config());
  RandomStream init = RandomStream::derive(seed, stream::init);
  model.init_weights(init);
  TrainOptions opt;
  opt.learning_rate = 1e-3;
  opt.momentum = 0.9;
  opt.epochs = epochs;
  opt.window_len = 100;
  opt.stride = 50;
  opt.clip_threshold = 25.0;
  opt.noise = {sigma_max, 0.5};
  opt.seed = seed;
  train_model(model, w.train_std, opt);
  return model;
}

// mean over held-out prefixes of the max-abs raw value at unroll step 100
double unroll_amplitude_at_100(ErdModel& model, const SyntheticWorld& w,
                               SampleMode mode) {
  double acc = 0.0;
  int count = 0;
  for (const auto& s : w.test_corpus) {
    for (std::size_t start : {0ul, 120ul, 240ul, 360ul}) {
      RandomStream sampler(7000 + count);
      std::vector<Vec> prefix(s.begin() + start, s.begin() + start + 60);
      auto gen =
          generate_continuation(model, standardize_frames(prefix, w.standardizer),
                                100, mode, sampler);
      Vec raw = w.standardizer.invert(gen.back());
      double mx = 0.0;
      for (double v : raw) mx = std::max(mx, std::fabs(v));
      acc += mx;
      ++count;
    }
  }
  return acc / count;
}

// -- criteria ------------------------------------------------------------------

void criterion1_gradients() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_at;
  auto check_model = [&](ErdModel& model, std::uint64_t seed) {
    RandomStream init = RandomStream::derive(seed, stream::init);
    model.init_weights(init);
    RandomStream data(seed + 17);
    const std::size_t t_len = 8;
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
    auto analytic = [&]() {
      for (auto& np : named) np.param->zero_grad();
      Tape tape;
      auto raw = model.forward(inputs, &tape);
      std::vector<Vec> grads;
      model.sequence_loss(raw, targets, true, &grads);
      model.backward(tape, grads);
    };
    auto r = finite_difference_check(named, loss, analytic, 1e-4);
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_at = r.worst_parameter;
    }
  };

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ErdConfig c;
    c.input_dim = 4;
    c.encoder_sizes = {6};
    c.lstm_sizes = {6};
    c.decoder_sizes = {6};
    c.output_head = OutputHead::gmm;
    c.gmm_components = 2;
    ErdModel erd(c);
    check_model(erd, seed);
    ErdModel lstm3 = make_lstm3lr(4, 6, OutputHead::gmm, 2);
    check_model(lstm3, seed);
  }
  const double secs = seconds_since(t0);
  report(1, "gradient correctness",
         worst < 1e-4 && secs < 30.0,
         fmt("max rel err %.3g (worst %s), %.1f s over 20 seeded micro-ERDs + "
             "LSTM-3LR variants",
             worst, worst_at.c_str(), secs));
}

void criterion2_gmm_oracle() {
  RandomStream rng(2024);
  double worst_diff = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const std::size_t k = 1 + rng.index(4), d = 1 + rng.index(6);
    GmmParams g;
    g.weights.assign(k, 0.0);
    double z = 0.0;
    for (auto& w : g.weights) z += (w = rng.uniform(0.05, 1.0));
    for (auto& w : g.weights) w /= z;
    g.means = Matrix(k, d);
    g.variances = Matrix(k, d);
    for (auto& v : g.means.values()) v = rng.normal();
    for (auto& v : g.variances.values()) v = rng.uniform(0.2, 2.5);
    Vec target(d);
    for (auto& v : target) v = rng.normal();
    worst_diff = std::max(
        worst_diff,
        std::fabs(gmm_nll(g, target) - reference::gmm_nll_naive(g, target)));
  }

  double worst_identity = 0.0;
  for (int it = 0; it < 100; ++it) {
    const std::size_t d = 1 + rng.index(6);
    GmmParams g;
    g.weights = {1.0};
    g.means = Matrix(1, d);
    for (auto& v : g.means.values()) v = rng.normal();
    g.variances = Matrix(1, d, 1.0);
    Vec x(d);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.normal();
      const double diff = x[j] - g.means(0, j);
      sq += diff * diff;
    }
    const double expect = 0.5 * d * kLogTwoPi + 0.5 * sq;
    worst_identity = std::max(worst_identity,
                              std::fabs(gmm_nll(g, x) - expect));
  }
  report(2, "GMM oracle equivalence",
         worst_diff < 1e-10 && worst_identity < 1e-12,
         fmt("1000 random cases max |lse - naive| = %.3g; K=1 unit-variance "
             "closed form max dev = %.3g",
             worst_diff, worst_identity));
}

void criterion3_viterbi_oracle() {
  const auto t0 = Clock::now();
  RandomStream rng(3033);
  int mismatches = 0;
  const int instances = 120;
  for (int it = 0; it < instances; ++it) {
    const std::size_t n = 2 + rng.index(2);      // N in {2, 3}
    const std::size_t t_len = 2 + rng.index(3);  // T in {2, 3, 4}
    HeatMapSequence seq(t_len);
    for (auto& s : seq) {
      s.joints = 1;
      s.side = n;
      s.maps.assign(1, Matrix(n, n));
      for (auto& v : s.maps[0].values()) v = rng.uniform(0.0, 2.0);
    }
    const double scale = rng.uniform(0.2, 3.0);
    auto pose = viterbi_smooth(seq, scale);
    std::vector<const Matrix*> unaries;
    for (const auto& s : seq) unaries.push_back(&s.maps[0]);
    auto brute = reference::viterbi_bruteforce_joint(unaries, scale);
    std::vector<std::size_t> dp_states;
    for (const auto& f : pose.frames)
      dp_states.push_back(static_cast<std::size_t>(f[0].y) * n +
                          static_cast<std::size_t>(f[0].x));
    const double dp_obj = reference::viterbi_objective(unaries, dp_states, scale);
    if (dp_states != brute.states || std::fabs(dp_obj - brute.objective) > 1e-9)
      ++mismatches;
  }
  const double secs = seconds_since(t0);
  report(3, "Viterbi oracle equivalence",
         mismatches == 0 && secs < 10.0,
         fmt("%d/%d instances match path and objective, %.2f s",
             instances - mismatches, instances, secs));
}

void criterion4_ngram_exactness() {
  SinusoidSpec spec;
  spec.dims = 8;
  spec.frames = 80;
  auto corpus = make_sinusoid_corpus(5, spec, 4044);
  NgramIndex index(corpus, 6);
  RandomStream rng(4055);
  int failures = 0;
  const int lifts = 60;
  for (int it = 0; it < lifts; ++it) {
    const std::size_t si = rng.index(corpus.size());
    const std::size_t plen = 6 + rng.index(7);
    const std::size_t steps = 1 + rng.index(3);
    const std::size_t start = rng.index(corpus[si].size() - plen - steps);
    std::vector<Vec> prefix(corpus[si].begin() + start,
                            corpus[si].begin() + start + plen);
    auto cont = index.continue_sequence(prefix, steps);
    bool ok = cont.match.distance <= 1e-12 && cont.frames.size() == steps;
    for (std::size_t t = 0; ok && t < steps; ++t)
      ok = cont.frames[t] == corpus[si][start + plen + t];
    if (!ok) ++failures;
  }
  report(4, "N-gram exactness",
         failures == 0,
         fmt("%d/%d corpus-lifted prefixes returned the true continuation at "
             "distance 0",
             lifts - failures, lifts));
}

void criterion5_synthetic_end_to_end(SyntheticWorld& w, ErdModel& model_out,
                                     bool& trained_ok) {
  const auto t0 = Clock::now();
  ErdModel model = train_desk_model(w, 7, 0.1, 60);
  const double train_secs = seconds_since(t0);

  // (a) closed-loop containment: 100-step unrolls from held-out prefixes
  // stay within 1.5x the per-dimension training amplitude at every step
  Vec amp(20, 0.0);
  for (const auto& s : w.train_corpus)
    for (const auto& f : s)
      for (int d = 0; d < 20; ++d) amp[d] = std::max(amp[d], std::fabs(f[d]));
  double worst_ratio = 0.0;
  RandomStream sampler(3);
  for (const auto& s : w.test_corpus) {
    std::vector<Vec> prefix(s.begin(), s.begin() + 60);
    auto gen = generate_continuation(
        model, standardize_frames(prefix, w.standardizer), 100,
        SampleMode::most_probable, sampler);
    for (const auto& f : gen) {
      Vec raw = w.standardizer.invert(f);
      for (int d = 0; d < 20; ++d)
        worst_ratio = std::max(worst_ratio, std::fabs(raw[d]) / amp[d]);
    }
  }

  // (b) 80 ms horizon error on held-out phases, ERD vs the 6-gram baseline
  HorizonProtocolOptions opt;
  opt.horizons_ms = {80};
  opt.prefixes = 8;
  opt.prefix_len = 60;
  auto erd_gen = [&](const std::vector<Vec>& raw_prefix, std::size_t steps) {
    RandomStream smp(11);
    auto g = generate_continuation(
        model, standardize_frames(raw_prefix, w.standardizer), steps,
        SampleMode::most_probable, smp);
    return destandardize_frames(g, w.standardizer);
  };
  auto erd_rep = run_horizon_protocol(erd_gen, w.test_corpus, 25.0, opt,
                                      &w.standardizer);
  NgramIndex index(w.train_corpus, 6);
  auto ngram_gen = [&](const std::vector<Vec>& raw_prefix, std::size_t steps) {
    return index.continue_sequence(raw_prefix, steps).frames;
  };
  auto ngram_rep = run_horizon_protocol(ngram_gen, w.test_corpus, 25.0, opt,
                                        &w.standardizer);

  const bool pass_time = train_secs < 900.0;
  const bool pass_a = worst_ratio < 1.5;
  const bool pass_b = erd_rep.mean_errors[0] < ngram_rep.mean_errors[0];
  report(5, "synthetic-dynamics end-to-end",
         pass_time && pass_a && pass_b,
         fmt("train %.0f s (< 900); (a) worst amplitude ratio %.3f (< 1.5); "
             "(b) 80 ms error ERD %.3f vs 6-gram %.3f",
             train_secs, worst_ratio, erd_rep.mean_errors[0],
             ngram_rep.mean_errors[0]));
  model_out = std::move(model);
  trained_ok = pass_time && pass_a && pass_b;
}

void criterion6_denoising_ablation(SyntheticWorld& w) {
  // The criterion-5 experiment re-run per arm: denoised (sigma_max 0.1)
  // against sigma_max = 0, five seeds each. Amplitude is the max-abs raw
  // value at unroll step 100, averaged over 16 held-out prefixes; the two
  // arms are compared on the 5-seed average. The arms of each seed train
  // concurrently (independent models, shared read-only corpus).
  double denoised = 0.0, noiseless = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto run_arm = [&w, seed](double sigma_max) {
      ErdModel m = train_desk_model(w, seed, sigma_max, 60);
      return unroll_amplitude_at_100(m, w, SampleMode::most_probable);
    };
    auto fut = std::async(std::launch::async, run_arm, 0.0);
    const double amp_a = run_arm(0.1);
    const double amp_b = fut.get();
    denoised += amp_a / 5.0;
    noiseless += amp_b / 5.0;
    per_seed += fmt("%s%.2f/%.2f", seed > 1 ? " " : "", amp_a, amp_b);
  }
  report(6, "denoising ablation",
         noiseless > denoised,
         fmt("step-100 amplitude, 5-seed mean: denoised %.3f vs sigma_max=0 "
             "%.3f (per seed %s)",
             denoised, noiseless, per_seed.c_str()));
}

void criterion7_protocol_fidelity() {
  const std::vector<std::size_t> expect = {2, 4, 6, 8, 10, 12, 14};
  auto horizons = default_horizons_ms();
  bool map_ok = horizons.size() == expect.size();
  std::string mapping;
  for (std::size_t i = 0; i < horizons.size() && map_ok; ++i) {
    const std::size_t idx = horizon_frame_index(horizons[i], 25.0);
    map_ok = idx == expect[i];
    mapping += fmt("%s%.0f->%zu", i ? " " : "", horizons[i], idx);
  }

  // the hand-constructed PCK step function: every prediction displaced by
  // exactly half the reference distance
  Pose2dSequence truth;
  for (int t = 0; t < 4; ++t)
    truth.frames.push_back({{0.0, 0.0}, {4.0, 0.0}});
  Pose2dSequence off = truth;
  for (auto& f : off.frames)
    for (auto& p : f) p.y += 2.0;
  auto curve = pck_curve(off, truth, {4.0, 4.0, 4.0, 4.0},
                         {0.1, 0.25, 0.49, 0.5, 0.75});
  const bool pck_ok = curve.rates[0] == 0.0 && curve.rates[1] == 0.0 &&
                      curve.rates[2] == 0.0 && curve.rates[3] == 1.0 &&
                      curve.rates[4] == 1.0;
  report(7, "protocol fidelity", map_ok && pck_ok,
         fmt("horizon mapping at 25 Hz: %s; PCK step function at tau=0.5 "
             "reproduced %s",
             mapping.c_str(), pck_ok ? "exactly" : "WRONG"));
}

std::string read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion8_determinism(const std::string& cli_path) {
  const fs::path dir = fs::temp_directory_path() / "erd-acceptance-c8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  bool ok = true;
  std::string detail;

  // synthetic mocap corpus for the CLI
  RandomStream rng = RandomStream::derive(88, stream::data);
  for (int s = 0; s < 2; ++s) {
    MocapSequence seq = make_synthetic_mocap(3, 120, 25.0, rng);
    write_mocap(seq, (dir / ("seq" + std::to_string(s) + ".csv")).string());
  }
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "train_data = " << (dir / "seq0.csv").string() << ", "
        << (dir / "seq1.csv").string() << "\n"
        << "encoder_sizes = 10\nlstm_sizes = 12\ndecoder_sizes = 10\n"
        << "gmm_components = 2\nepochs = 3\nwindow_len = 20\nstride = 40\n"
        << "seed = 13\n";
  }
  auto run = [&](const std::string& args) {
    const std::string cmd =
        cli_path + " " + args + " > /dev/null 2> /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string cfg = (dir / "run.cfg").string();
  const std::string out1 = (dir / "out1").string();
  const std::string out2 = (dir / "out2").string();
  if (!fs::exists(cli_path)) {
    ok = false;
    detail = "erd-cli binary not found at " + cli_path;
  } else if (!run("train --config " + cfg + " --out " + out1) ||
             !run("train --config " + cfg + " --out " + out2)) {
    ok = false;
    detail = "train command failed";
  } else {
    const std::string log1 = read_binary_file(out1 + "/training_log.csv");
    const bool logs_equal =
        !log1.empty() && log1 == read_binary_file(out2 + "/training_log.csv");
    const std::string ck1 = read_binary_file(out1 + "/checkpoint.json");
    const bool ckpt_equal =
        !ck1.empty() && ck1 == read_binary_file(out2 + "/checkpoint.json");
    bool gen_equal = false;
    if (run("generate --checkpoint " + out1 + "/checkpoint.json --prefix " +
            (dir / "seq0.csv").string() + " --steps 30 --seed 5 --out " +
            out1) &&
        run("generate --checkpoint " + out2 + "/checkpoint.json --prefix " +
            (dir / "seq0.csv").string() + " --steps 30 --seed 5 --out " +
            out2)) {
      const std::string gen1 = read_binary_file(out1 + "/generated.csv");
      gen_equal =
          !gen1.empty() && gen1 == read_binary_file(out2 + "/generated.csv");
    }
    ok = logs_equal && ckpt_equal && gen_equal;
    detail = fmt("fixed-seed re-runs byte-identical: log %s, checkpoint %s, "
                 "generated %s",
                 logs_equal ? "yes" : "NO", ckpt_equal ? "yes" : "NO",
                 gen_equal ? "yes" : "NO");
  }

  // in-process round trips: mocap CSV values and checkpoint bits
  {
    RandomStream r2(99);
    MocapSequence seq = make_synthetic_mocap(4, 30, 50.0, r2);
    const std::string p = (dir / "rt.csv").string();
    write_mocap(seq, p);
    MocapSequence loaded = load_mocap(p);
    const bool csv_exact = loaded.frames == seq.frames &&
                           loaded.frame_rate_hz == seq.frame_rate_hz;

    ErdConfig c;
    c.input_dim = seq.dim();
    c.encoder_sizes = {8};
    c.lstm_sizes = {8};
    c.decoder_sizes = {8};
    c.gmm_components = 2;
    ErdModel model(c);
    RandomStream init = RandomStream::derive(5, stream::init);
    model.init_weights(init);
    Standardizer st = fit_standardizer({seq});
    const std::string ck = (dir / "rt.ckpt.json").string();
    save_checkpoint(model, st, ck);
    Checkpoint back = load_checkpoint(ck);
    bool ckpt_exact = back.standardizer.mean == st.mean;
    auto a = model.named_parameters();
    auto b = back.model.named_parameters();
    for (std::size_t i = 0; i < a.size() && ckpt_exact; ++i)
      ckpt_exact = a[i].param->value.values() == b[i].param->value.values();

    ok = ok && csv_exact && ckpt_exact;
    detail += fmt("; CSV round trip %s, checkpoint round trip %s",
                  csv_exact ? "exact" : "NO", ckpt_exact ? "bit-exact" : "NO");
  }
  fs::remove_all(dir);
  report(8, "determinism and round-trips", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
#ifdef ERD_CLI_PATH
  std::string cli_path = ERD_CLI_PATH;
#else
  std::string cli_path;
#endif
  if (argc > 1) cli_path = argv[1];

  criterion1_gradients();
  criterion2_gmm_oracle();
  criterion3_viterbi_oracle();
  criterion4_ngram_exactness();

  SyntheticWorld world = make_world();
  ErdModel desk_model;
  bool trained_ok = false;
  criterion5_synthetic_end_to_end(world, desk_model, trained_ok);
  criterion6_denoising_ablation(world);
  criterion7_protocol_fidelity();
  criterion8_determinism(cli_path);

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
