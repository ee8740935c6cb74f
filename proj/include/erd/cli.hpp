#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "erd/baselines.hpp"
#include "erd/checkpoint.hpp"
#include "erd/config.hpp"
#include "erd/eval.hpp"
#include "erd/selftest.hpp"
#include "erd/training.hpp"

namespace erd::cli {

/// train: standardize -> window -> denoising corruption -> BPTT -> clip ->
/// momentum step, per epoch; writes checkpoint.json and training_log.csv
/// under the output directory.
inline int run_train(const RunConfig& cfg, std::ostream& out = std::cout) {
  namespace fs = std::filesystem;
  const auto paths = expand_data_paths(cfg.train_data);
  std::vector<MocapSequence> seqs;
  for (const auto& p : paths) {
    MocapSequence s = load_mocap(p);
    if (cfg.subsample_factor > 1) s = subsample(s, cfg.subsample_factor);
    seqs.push_back(std::move(s));
  }
  for (const auto& s : seqs)
    if (s.dim() != seqs[0].dim())
      throw ArgumentError("train: sequences disagree on feature dimension");

  Standardizer st = fit_standardizer(seqs);
  std::vector<std::vector<Vec>> standardized;
  standardized.reserve(seqs.size());
  for (const auto& s : seqs)
    standardized.push_back(standardize_frames(s.frames, st));

  ErdModel model(cfg.erd_config(seqs[0].dim()));
  RandomStream init = RandomStream::derive(cfg.seed, stream::init);
  model.init_weights(init);

  fs::create_directories(cfg.out_dir);
  const std::string log_path = (fs::path(cfg.out_dir) / "training_log.csv").string();
  std::ofstream log(log_path);
  if (!log) throw ArgumentError("train: cannot open '" + log_path + "'");
  log << "epoch,sigma,mean_loss\n";

  auto logs = train_model(model, standardized, cfg.train_options(),
                          [&](const EpochLog& e) {
                            log << e.epoch << "," << detail::fmt_double(e.sigma)
                                << "," << detail::fmt_double(e.mean_loss)
                                << "\n";
                            log.flush();
                          });

  const std::string ckpt = (fs::path(cfg.out_dir) / "checkpoint.json").string();
  save_checkpoint(model, st, ckpt);
  out << "trained " << logs.size() << " epochs on " << seqs.size()
      << " sequences; final mean loss "
      << detail::fmt_double(logs.back().mean_loss) << "\n"
      << "checkpoint: " << ckpt << "\n"
      << "log: " << log_path << "\n";
  return 0;
}

struct GenerateArgs {
  std::string checkpoint;
  std::string prefix_file;
  std::size_t steps = 100;
  SampleMode mode = SampleMode::most_probable;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string absolute_out;  // optional absolute-trajectory CSV
};

/// generate: condition on a mocap prefix, unroll closed loop, destandardize
/// and write a standard mocap CSV (plus, optionally, the integrated absolute
/// global trajectory).
inline int run_generate(const GenerateArgs& args, std::ostream& out = std::cout) {
  namespace fs = std::filesystem;
  Checkpoint ck = load_checkpoint(args.checkpoint);
  MocapSequence prefix = load_mocap(args.prefix_file);
  if (prefix.dim() != ck.config.input_dim)
    throw ArgumentError("generate: prefix dimension " +
                        std::to_string(prefix.dim()) +
                        " does not match model input " +
                        std::to_string(ck.config.input_dim));

  RandomStream sampler = RandomStream::derive(args.seed, stream::sampling);
  auto std_prefix = standardize_frames(prefix.frames, ck.standardizer);
  auto generated = generate_continuation(ck.model, std_prefix, args.steps,
                                         args.mode, sampler);

  MocapSequence result;
  result.frame_rate_hz = prefix.frame_rate_hz;
  result.joint_names = prefix.joint_names;
  result.frames = destandardize_frames(generated, ck.standardizer);

  fs::create_directories(args.out_dir);
  const std::string gen_path = (fs::path(args.out_dir) / "generated.csv").string();
  write_mocap(result, gen_path);
  out << "generated " << result.frames.size() << " frames: " << gen_path << "\n";

  if (!args.absolute_out.empty()) {
    // integrate the relative global channel into an absolute trajectory
    const std::size_t ad = result.angle_dim();
    std::vector<GlobalDelta> deltas(result.frames.size() + 1);
    for (std::size_t t = 0; t < result.frames.size(); ++t)
      deltas[t + 1] = {result.frames[t][ad], result.frames[t][ad + 1],
                       result.frames[t][ad + 2]};
    auto traj = integrate_global(deltas, GlobalPose{});
    std::ofstream abs_out(args.absolute_out);
    if (!abs_out)
      throw ArgumentError("generate: cannot open '" + args.absolute_out + "'");
    abs_out << "x,y,yaw\n";
    for (std::size_t t = 1; t < traj.size(); ++t)
      abs_out << detail::fmt_double(traj[t].x) << ","
              << detail::fmt_double(traj[t].y) << ","
              << detail::fmt_double(traj[t].yaw) << "\n";
    out << "absolute trajectory: " << args.absolute_out << "\n";
  }
  return 0;
}

struct EvaluateArgs {
  std::string protocol = "horizons";  // horizons | pck | viterbi
  // horizons
  std::string checkpoint;             // ERD predictor...
  std::string baseline;               // ...or "ngram"
  // pck
  std::string pred_poses;
  std::string truth_poses;
  std::string heatmaps;               // source for pck via argmax, or viterbi input
  double viterbi_scale = 1.0;
  std::size_t norm_joint_a = 0, norm_joint_b = 1;
  std::vector<double> thresholds = {0.05, 0.1, 0.15, 0.2, 0.25,
                                    0.3,  0.35, 0.4, 0.45, 0.5};
  std::string pose_baseline;          // "nm" | "of" applied to truth poses
  std::size_t horizon_frames = 10;
  std::string out_dir = "out";
};

inline int run_evaluate(const RunConfig& cfg, const EvaluateArgs& args,
                        std::ostream& out = std::cout) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);

  if (args.protocol == "horizons") {
    const auto test_paths = expand_data_paths(cfg.test_data);
    std::vector<MocapSequence> test;
    for (const auto& p : test_paths) {
      MocapSequence s = load_mocap(p);
      if (cfg.subsample_factor > 1) s = subsample(s, cfg.subsample_factor);
      test.push_back(std::move(s));
    }
    std::vector<std::vector<Vec>> test_frames;
    for (const auto& s : test) test_frames.push_back(s.frames);

    HorizonProtocolOptions opt;
    opt.horizons_ms = cfg.horizons_ms;
    opt.prefixes = cfg.prefixes;
    opt.prefix_len = cfg.prefix_len;
    opt.norm_dims = test[0].angle_dim();

    HorizonErrorReport rep;
    if (!args.checkpoint.empty()) {
      Checkpoint ck = load_checkpoint(args.checkpoint);
      if (ck.config.input_dim != test[0].dim())
        throw ArgumentError("evaluate: model/test dimension mismatch");
      RandomStream sampler = RandomStream::derive(cfg.seed, stream::sampling);
      auto generator = [&](const std::vector<Vec>& raw_prefix,
                           std::size_t steps) {
        auto std_prefix = standardize_frames(raw_prefix, ck.standardizer);
        auto gen = generate_continuation(ck.model, std_prefix, steps,
                                         SampleMode::most_probable, sampler);
        return destandardize_frames(gen, ck.standardizer);
      };
      rep = run_horizon_protocol(generator, test_frames, test[0].frame_rate_hz,
                                 opt, &ck.standardizer);
    } else if (args.baseline == "ngram") {
      const auto train_paths = expand_data_paths(cfg.train_data);
      std::vector<MocapSequence> train;
      for (const auto& p : train_paths) {
        MocapSequence s = load_mocap(p);
        if (cfg.subsample_factor > 1) s = subsample(s, cfg.subsample_factor);
        train.push_back(std::move(s));
      }
      std::vector<std::vector<Vec>> corpus;
      for (const auto& s : train) corpus.push_back(s.frames);
      Standardizer st = fit_standardizer(train);
      NgramIndex index(std::move(corpus), cfg.ngram_n, train[0].angle_dim());
      auto generator = [&](const std::vector<Vec>& raw_prefix,
                           std::size_t steps) {
        return index.continue_sequence(raw_prefix, steps).frames;
      };
      rep = run_horizon_protocol(generator, test_frames, test[0].frame_rate_hz,
                                 opt, &st);
    } else {
      throw ArgumentError("evaluate horizons: need --checkpoint or --baseline ngram");
    }
    const std::string path = (fs::path(args.out_dir) / "horizon_report.csv").string();
    write_horizon_report_csv(rep, path);
    out << "horizon report (" << rep.prefix_count << " prefixes): " << path << "\n";
    return 0;
  }

  if (args.protocol == "viterbi") {
    auto maps = load_heatmaps(args.heatmaps);
    auto poses = viterbi_smooth(maps, args.viterbi_scale);
    const std::string path = (fs::path(args.out_dir) / "viterbi_poses.csv").string();
    write_pose2d(poses, path);
    out << "viterbi-smoothed poses: " << path << "\n";
    return 0;
  }

  if (args.protocol == "pck") {
    Pose2dSequence truth = load_pose2d(args.truth_poses);
    Pose2dSequence pred;
    if (!args.pred_poses.empty()) {
      pred = load_pose2d(args.pred_poses);
    } else if (!args.heatmaps.empty()) {
      auto maps = load_heatmaps(args.heatmaps);
      if (args.viterbi_scale > 0.0) {
        pred = viterbi_smooth(maps, args.viterbi_scale);
      } else {
        for (const auto& stack : maps) {
          std::vector<Point2> frame;
          for (const auto& loc : heatmap_argmax(stack))
            frame.push_back({static_cast<double>(loc.col),
                             static_cast<double>(loc.row)});
          pred.frames.push_back(std::move(frame));
        }
      }
    } else if (args.pose_baseline == "nm") {
      pred = zero_motion_forecast(truth, args.horizon_frames);
    } else if (args.pose_baseline == "of") {
      pred = constant_displacement_forecast(truth, args.horizon_frames);
    } else {
      throw ArgumentError(
          "evaluate pck: need --pred-poses, --heatmaps or --pose-baseline");
    }
    auto refs = reference_distances(truth, args.norm_joint_a, args.norm_joint_b);
    auto curve = pck_curve(pred, truth, refs, args.thresholds);
    const std::string path = (fs::path(args.out_dir) / "pck.csv").string();
    write_pck_csv(curve, path);
    out << "pck curve: " << path << "\n";
    return 0;
  }

  throw ArgumentError("evaluate: unknown protocol '" + args.protocol + "'");
}

/// selftest: gradient checks, oracle equivalences and round-trip
/// invariants; prints one line per check, nonzero exit on any failure.
inline int run_selftest_cmd(const SelftestOptions& opt = {},
                            std::ostream& out = std::cout) {
  SelftestReport report = run_selftest(opt);
  for (const auto& c : report.checks)
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.name
        << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
  out << (report.all_pass() ? "selftest: all checks passed\n"
                            : "selftest: FAILURES\n");
  return report.all_pass() ? 0 : 1;
}

}  // namespace erd::cli
