#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "erd/eval.hpp"
#include "erd/model.hpp"
#include "erd/training.hpp"

namespace erd {

/// Everything a reproducible run needs, loadable from a flat key=value file.
/// Unknown keys are errors; a fixed seed makes every command deterministic
/// end to end.
struct RunConfig {
  // data
  std::vector<std::string> train_data;  // CSV paths, or a directory of *.csv
  std::vector<std::string> test_data;
  std::size_t subsample_factor = 1;

  // architecture
  std::vector<std::size_t> encoder_sizes = {64, 64};
  std::vector<std::size_t> lstm_sizes = {128};
  std::vector<std::size_t> decoder_sizes = {64, 64};
  std::string output_head = "gmm";
  std::size_t gmm_components = 5;
  double variance_pad = 0.01;
  std::string hidden_activation = "relu";
  bool lstm_peepholes = false;

  // optimizer
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t epochs = 200;
  std::size_t window_len = 100;
  std::size_t stride = 50;
  double clip_threshold = 25.0;

  // denoising curriculum
  double sigma_max = 0.1;
  double ramp_fraction = 0.5;

  // evaluation protocol
  std::vector<double> horizons_ms = default_horizons_ms();
  std::size_t prefixes = 8;
  std::size_t prefix_len = 100;
  std::size_t ngram_n = 6;

  // run
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  ErdConfig erd_config(std::size_t input_dim) const {
    ErdConfig c;
    c.input_dim = input_dim;
    c.encoder_sizes = encoder_sizes;
    c.lstm_sizes = lstm_sizes;
    c.decoder_sizes = decoder_sizes;
    if (output_head == "gmm")
      c.output_head = OutputHead::gmm;
    else if (output_head == "euclidean")
      c.output_head = OutputHead::euclidean;
    else
      throw ArgumentError("config: output_head must be gmm or euclidean");
    c.gmm_components = gmm_components;
    c.variance_pad = variance_pad;
    if (hidden_activation == "relu")
      c.hidden_activation = Activation::relu;
    else if (hidden_activation == "tanh")
      c.hidden_activation = Activation::tanh;
    else if (hidden_activation == "identity")
      c.hidden_activation = Activation::identity;
    else
      throw ArgumentError("config: unknown hidden_activation '" +
                          hidden_activation + "'");
    c.lstm_peepholes = lstm_peepholes;
    return c;
  }

  TrainOptions train_options() const {
    TrainOptions t;
    t.learning_rate = learning_rate;
    t.momentum = momentum;
    t.epochs = epochs;
    t.window_len = window_len;
    t.stride = stride;
    t.clip_threshold = clip_threshold;
    t.noise = NoiseSchedule{sigma_max, ramp_fraction};
    t.seed = seed;
    return t;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    const std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& s,
                                                const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    try {
      out.push_back(std::stoul(item));
    } catch (...) {
      throw ParseError("config: bad value '" + item + "' for " + key);
    }
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s,
                                             const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(s))
    out.push_back(parse_double(item, "config key " + key));
  return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError("config: bad boolean '" + s + "' for " + key);
}

}  // namespace detail

/// Flat key = value format; blank lines and lines starting with '#' are
/// ignored. Unknown keys are errors.
inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  using detail::parse_bool;
  using detail::parse_double_list;
  using detail::parse_size_list;
  auto as_double = [&](const std::string& v) {
    return detail::parse_double(v, "config key " + key);
  };
  auto as_size = [&](const std::string& v) -> std::size_t {
    try {
      return std::stoul(v);
    } catch (...) {
      throw ParseError("config: bad value '" + v + "' for " + key);
    }
  };

  if (key == "train_data") cfg.train_data = detail::split_list(value);
  else if (key == "test_data") cfg.test_data = detail::split_list(value);
  else if (key == "subsample") cfg.subsample_factor = as_size(value);
  else if (key == "encoder_sizes") cfg.encoder_sizes = parse_size_list(value, key);
  else if (key == "lstm_sizes") cfg.lstm_sizes = parse_size_list(value, key);
  else if (key == "decoder_sizes") cfg.decoder_sizes = parse_size_list(value, key);
  else if (key == "output_head") cfg.output_head = value;
  else if (key == "gmm_components") cfg.gmm_components = as_size(value);
  else if (key == "variance_pad") cfg.variance_pad = as_double(value);
  else if (key == "hidden_activation") cfg.hidden_activation = value;
  else if (key == "lstm_peepholes") cfg.lstm_peepholes = parse_bool(value, key);
  else if (key == "learning_rate") cfg.learning_rate = as_double(value);
  else if (key == "momentum") cfg.momentum = as_double(value);
  else if (key == "epochs") cfg.epochs = as_size(value);
  else if (key == "window_len") cfg.window_len = as_size(value);
  else if (key == "stride") cfg.stride = as_size(value);
  else if (key == "clip_threshold") cfg.clip_threshold = as_double(value);
  else if (key == "sigma_max") cfg.sigma_max = as_double(value);
  else if (key == "ramp_fraction") cfg.ramp_fraction = as_double(value);
  else if (key == "horizons_ms") cfg.horizons_ms = parse_double_list(value, key);
  else if (key == "prefixes") cfg.prefixes = as_size(value);
  else if (key == "prefix_len") cfg.prefix_len = as_size(value);
  else if (key == "ngram_n") cfg.ngram_n = as_size(value);
  else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (...) {
      throw ParseError("config: bad value '" + value + "' for seed");
    }
  } else if (key == "out") cfg.out_dir = value;
  else
    throw ParseError("config: unknown key '" + key + "'");
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_run_config: cannot open '" + path + "'");
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected key = value");
    try {
      apply_config_entry(cfg, detail::trim(t.substr(0, eq)),
                         detail::trim(t.substr(eq + 1)));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

/// Expands a data-path entry: a directory becomes its *.csv files in name
/// order, a file stands for itself.
inline std::vector<std::string> expand_data_paths(
    const std::vector<std::string>& entries) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& entry : entries) {
    if (fs::is_directory(entry)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(entry))
        if (e.path().extension() == ".csv") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(entry);
    }
  }
  if (out.empty()) throw ArgumentError("no data files found");
  return out;
}

}  // namespace erd
