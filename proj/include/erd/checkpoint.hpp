#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "erd/mocap.hpp"
#include "erd/model.hpp"

namespace erd {

constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ErdConfig config;
  Standardizer standardizer;
  ErdModel model;  // parameters populated on load
};

namespace detail {
inline nlohmann::json config_to_json(const ErdConfig& c) {
  return nlohmann::json{
      {"input_dim", c.input_dim},
      {"encoder_sizes", c.encoder_sizes},
      {"lstm_sizes", c.lstm_sizes},
      {"decoder_sizes", c.decoder_sizes},
      {"output_head", to_string(c.output_head)},
      {"gmm_components", c.gmm_components},
      {"variance_pad", c.variance_pad},
      {"hidden_activation", to_string(c.hidden_activation)},
      {"lstm_peepholes", c.lstm_peepholes},
  };
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ParseError("unknown activation '" + s + "'");
}

inline ErdConfig config_from_json(const nlohmann::json& j) {
  ErdConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.encoder_sizes = j.at("encoder_sizes").get<std::vector<std::size_t>>();
  c.lstm_sizes = j.at("lstm_sizes").get<std::vector<std::size_t>>();
  c.decoder_sizes = j.at("decoder_sizes").get<std::vector<std::size_t>>();
  const std::string head = j.at("output_head").get<std::string>();
  if (head == "euclidean")
    c.output_head = OutputHead::euclidean;
  else if (head == "gmm")
    c.output_head = OutputHead::gmm;
  else
    throw ParseError("unknown output head '" + head + "'");
  c.gmm_components = j.at("gmm_components").get<std::size_t>();
  c.variance_pad = j.at("variance_pad").get<double>();
  c.hidden_activation =
      activation_from_string(j.at("hidden_activation").get<std::string>());
  c.lstm_peepholes = j.at("lstm_peepholes").get<bool>();
  return c;
}
}  // namespace detail

/// Writes a self-describing checkpoint: version, config, standardizer and
/// every parameter matrix in row-major order with its declared shape.
/// Doubles survive the JSON round trip bit-exactly.
inline void save_checkpoint(ErdModel& model, const Standardizer& standardizer,
                            const std::string& path) {
  nlohmann::json j;
  j["format"] = "erd-checkpoint";
  j["version"] = kCheckpointVersion;
  j["config"] = detail::config_to_json(model.config());
  j["standardizer"] = {{"mean", standardizer.mean}, {"std", standardizer.std}};
  nlohmann::json params = nlohmann::json::array();
  for (auto& np : model.named_parameters()) {
    params.push_back({{"name", np.name},
                      {"rows", np.param->rows()},
                      {"cols", np.param->cols()},
                      {"values", np.param->value.values()}});
  }
  j["parameters"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw ArgumentError("save_checkpoint: cannot open '" + path + "'");
  out << j.dump() << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_checkpoint: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("load_checkpoint: " + path + ": " + e.what());
  }
  if (j.value("format", "") != "erd-checkpoint")
    throw ParseError("load_checkpoint: '" + path + "' is not a checkpoint");
  const int version = j.value("version", -1);
  if (version != kCheckpointVersion)
    throw ParseError("load_checkpoint: unsupported version " +
                     std::to_string(version));

  Checkpoint ck;
  ck.config = detail::config_from_json(j.at("config"));
  ck.standardizer.mean = j.at("standardizer").at("mean").get<Vec>();
  ck.standardizer.std = j.at("standardizer").at("std").get<Vec>();
  ck.model = ErdModel(ck.config);

  auto named = ck.model.named_parameters();
  const auto& params = j.at("parameters");
  if (params.size() != named.size())
    throw ParseError("load_checkpoint: parameter count mismatch");
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& pj = params[i];
    if (pj.at("name").get<std::string>() != named[i].name)
      throw ParseError("load_checkpoint: parameter order mismatch at '" +
                       named[i].name + "'");
    if (pj.at("rows").get<std::size_t>() != named[i].param->rows() ||
        pj.at("cols").get<std::size_t>() != named[i].param->cols())
      throw ParseError("load_checkpoint: shape mismatch at '" + named[i].name +
                       "'");
    named[i].param->value.values() = pj.at("values").get<std::vector<double>>();
  }
  return ck;
}

}  // namespace erd
