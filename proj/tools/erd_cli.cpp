// Command-line front end: train / generate / evaluate / selftest.

#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "erd/cli.hpp"

namespace {

using FieldCopy = std::function<void(erd::RunConfig&, const erd::RunConfig&)>;

/// Registers the RunConfig flags on a subcommand, binding them to `cli_cfg`,
/// and records per-flag copy functions so explicit flags can be re-applied
/// on top of a config file (command line wins over file).
void add_config_flags(CLI::App* cmd, erd::RunConfig& cli_cfg,
                      std::string& config_path,
                      std::vector<std::pair<CLI::Option*, FieldCopy>>& table) {
  cmd->add_option("--config", config_path, "flat key=value config file");
  auto reg = [&](CLI::Option* opt, FieldCopy copy) {
    table.emplace_back(opt, std::move(copy));
  };
#define ERD_FLAG(flag, field, help)                                   \
  reg(cmd->add_option(flag, cli_cfg.field, help),                     \
      [](erd::RunConfig& dst, const erd::RunConfig& src) {            \
        dst.field = src.field;                                        \
      })
  ERD_FLAG("--seed", seed, "global RNG seed");
  ERD_FLAG("--out", out_dir, "output directory");
  ERD_FLAG("--train-data", train_data, "training CSVs or a directory");
  ERD_FLAG("--test-data", test_data, "test CSVs or a directory");
  ERD_FLAG("--subsample", subsample_factor, "keep every k-th frame");
  ERD_FLAG("--encoder-sizes", encoder_sizes, "encoder layer sizes");
  ERD_FLAG("--lstm-sizes", lstm_sizes, "LSTM layer sizes");
  ERD_FLAG("--decoder-sizes", decoder_sizes, "decoder layer sizes");
  ERD_FLAG("--output-head", output_head, "gmm | euclidean");
  ERD_FLAG("--gmm-components", gmm_components, "mixture components");
  ERD_FLAG("--variance-pad", variance_pad, "training-time variance padding");
  ERD_FLAG("--learning-rate", learning_rate, "SGD learning rate");
  ERD_FLAG("--momentum", momentum, "SGD momentum");
  ERD_FLAG("--epochs", epochs, "training epochs");
  ERD_FLAG("--window-len", window_len, "truncated BPTT window");
  ERD_FLAG("--stride", stride, "window stride");
  ERD_FLAG("--clip-threshold", clip_threshold, "global gradient-norm clip");
  ERD_FLAG("--sigma-max", sigma_max, "max corruption noise std");
  ERD_FLAG("--ramp-fraction", ramp_fraction,
           "fraction of training over which noise ramps up");
  ERD_FLAG("--horizons-ms", horizons_ms, "evaluation horizons (ms)");
  ERD_FLAG("--prefixes", prefixes, "prefixes per test sequence");
  ERD_FLAG("--prefix-len", prefix_len, "conditioning prefix length");
  ERD_FLAG("--ngram-n", ngram_n, "N-gram window length");
#undef ERD_FLAG
}

erd::RunConfig merge_config(
    const erd::RunConfig& cli_cfg, const std::string& config_path,
    const std::vector<std::pair<CLI::Option*, FieldCopy>>& table) {
  if (config_path.empty()) return cli_cfg;
  erd::RunConfig cfg = erd::load_run_config(config_path);
  for (const auto& [opt, copy] : table)
    if (opt->count() > 0) copy(cfg, cli_cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoder-Recurrent-Decoder models for human motion dynamics"};
  app.require_subcommand(1);

  erd::RunConfig train_cfg, eval_cfg;
  std::string train_config_path, eval_config_path;
  std::vector<std::pair<CLI::Option*, FieldCopy>> train_table, eval_table;

  auto* train = app.add_subcommand("train", "train a model on mocap CSVs");
  add_config_flags(train, train_cfg, train_config_path, train_table);

  auto* generate =
      app.add_subcommand("generate", "synthesize motion from a prefix");
  erd::cli::GenerateArgs gen_args;
  std::string mode = "most_probable";
  generate->add_option("--checkpoint", gen_args.checkpoint, "model checkpoint")
      ->required();
  generate->add_option("--prefix", gen_args.prefix_file, "conditioning mocap CSV")
      ->required();
  generate->add_option("--steps", gen_args.steps, "frames to generate");
  generate->add_option("--mode", mode, "most_probable | stochastic");
  generate->add_option("--seed", gen_args.seed, "sampling seed");
  generate->add_option("--out", gen_args.out_dir, "output directory");
  generate->add_option("--absolute-out", gen_args.absolute_out,
                       "also write integrated absolute trajectory CSV");

  auto* evaluate = app.add_subcommand("evaluate", "run an evaluation protocol");
  erd::cli::EvaluateArgs eval_args;
  add_config_flags(evaluate, eval_cfg, eval_config_path, eval_table);
  evaluate->add_option("--protocol", eval_args.protocol,
                       "horizons | pck | viterbi");
  evaluate->add_option("--checkpoint", eval_args.checkpoint, "ERD checkpoint");
  evaluate->add_option("--baseline", eval_args.baseline, "mocap baseline: ngram");
  evaluate->add_option("--pred-poses", eval_args.pred_poses,
                       "predicted pose CSV (pck)");
  evaluate->add_option("--truth-poses", eval_args.truth_poses,
                       "ground-truth pose CSV (pck)");
  evaluate->add_option("--heatmaps", eval_args.heatmaps,
                       "heat-map sequence file");
  evaluate->add_option("--viterbi-scale", eval_args.viterbi_scale,
                       "smoothness scale (grid cells); 0 = plain argmax");
  evaluate->add_option("--norm-a", eval_args.norm_joint_a,
                       "PCK normalization joint A");
  evaluate->add_option("--norm-b", eval_args.norm_joint_b,
                       "PCK normalization joint B");
  evaluate->add_option("--thresholds", eval_args.thresholds,
                       "PCK tolerance radii");
  evaluate->add_option("--pose-baseline", eval_args.pose_baseline,
                       "pose forecasting baseline: nm | of");
  evaluate->add_option("--horizon-frames", eval_args.horizon_frames,
                       "forecast horizon for nm/of baselines");

  auto* selftest =
      app.add_subcommand("selftest", "run built-in verification checks");
  erd::SelftestOptions selftest_opt;
  selftest
      ->add_option("--inject-gradient-fault",
                   selftest_opt.inject_gradient_fault,
                   "perturb the named parameter's gradient (negative control)")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) {
      return erd::cli::run_train(
          merge_config(train_cfg, train_config_path, train_table));
    }
    if (app.got_subcommand(generate)) {
      if (mode == "most_probable")
        gen_args.mode = erd::SampleMode::most_probable;
      else if (mode == "stochastic")
        gen_args.mode = erd::SampleMode::stochastic;
      else
        throw erd::ArgumentError("unknown mode '" + mode + "'");
      return erd::cli::run_generate(gen_args);
    }
    if (app.got_subcommand(evaluate)) {
      erd::RunConfig cfg = merge_config(eval_cfg, eval_config_path, eval_table);
      eval_args.out_dir = cfg.out_dir;
      return erd::cli::run_evaluate(cfg, eval_args);
    }
    if (app.got_subcommand(selftest)) {
      return erd::cli::run_selftest_cmd(selftest_opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
