#pragma once

#include <string>
#include <variant>
#include <vector>

#include "erd/gmm.hpp"
#include "erd/net.hpp"

namespace erd {

enum class OutputHead { euclidean, gmm };

inline std::string to_string(OutputHead h) {
  return h == OutputHead::euclidean ? "euclidean" : "gmm";
}

/// Architecture of an Encoder-Recurrent-Decoder model. Encoder and decoder
/// are fully connected stacks around the LSTM layers; the final output layer
/// is linear and parameterizes either a single next-frame vector (euclidean)
/// or a Gaussian mixture over it (gmm).
struct ErdConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> encoder_sizes;
  std::vector<std::size_t> lstm_sizes;
  std::vector<std::size_t> decoder_sizes;
  OutputHead output_head = OutputHead::gmm;
  std::size_t gmm_components = 5;
  double variance_pad = 0.01;
  Activation hidden_activation = Activation::relu;
  bool lstm_peepholes = false;

  std::size_t output_dim() const { return input_dim; }  // next-frame prediction
  std::size_t head_dim() const {
    return output_head == OutputHead::euclidean
               ? output_dim()
               : gmm_head_dim(gmm_components, output_dim());
  }

  void validate() const {
    if (input_dim == 0) throw ArgumentError("ErdConfig: input_dim must be >= 1");
    if (lstm_sizes.empty())
      throw ArgumentError("ErdConfig: at least one LSTM layer required");
    for (auto s : encoder_sizes)
      if (s == 0) throw ArgumentError("ErdConfig: zero encoder size");
    for (auto s : lstm_sizes)
      if (s == 0) throw ArgumentError("ErdConfig: zero lstm size");
    for (auto s : decoder_sizes)
      if (s == 0) throw ArgumentError("ErdConfig: zero decoder size");
    if (output_head == OutputHead::gmm && gmm_components == 0)
      throw ArgumentError("ErdConfig: gmm_components must be >= 1");
    if (variance_pad < 0.0)
      throw ArgumentError("ErdConfig: variance_pad must be >= 0");
  }
};

/// The assembled model: encoder FC stack, LSTM stack, decoder FC stack and a
/// linear output layer, plus persistent recurrent state for streaming use.
class ErdModel {
 public:
  ErdModel() = default;

  explicit ErdModel(ErdConfig config) : config_(std::move(config)) {
    config_.validate();
    std::size_t dim = config_.input_dim;
    for (std::size_t s : config_.encoder_sizes) {
      net_.add_fc(dim, s, config_.hidden_activation);
      dim = s;
      ++encoder_layers_;
    }
    for (std::size_t s : config_.lstm_sizes) {
      net_.add_lstm(dim, s, config_.lstm_peepholes);
      dim = s;
    }
    for (std::size_t s : config_.decoder_sizes) {
      net_.add_fc(dim, s, config_.hidden_activation);
      dim = s;
    }
    net_.add_fc(dim, config_.head_dim(), Activation::identity);
    state_ = net_.zero_state();
  }

  const ErdConfig& config() const { return config_; }
  LayerStack& net() { return net_; }
  const LayerStack& net() const { return net_; }

  void init_weights(RandomStream& rng) { net_.init_weights(rng); }

  void reset_state() { state_ = net_.zero_state(); }
  StackState& state() { return state_; }

  /// Advances the persistent recurrent state by one step and returns the raw
  /// output-layer vector.
  Vec step_raw(const Vec& x) {
    if (x.size() != config_.input_dim)
      throw ShapeError("ErdModel::step_raw: input dim " +
                       std::to_string(x.size()) + " != " +
                       std::to_string(config_.input_dim));
    return net_.step(x, state_);
  }

  /// Streaming step with the head applied: a plain vector for the euclidean
  /// head, GmmParams for the mixture head. `variance_pad` is train-time only,
  /// so inference outputs carry the raw exponential-layer variances.
  std::variant<Vec, GmmParams> step(const Vec& x) {
    Vec raw = step_raw(x);
    if (config_.output_head == OutputHead::euclidean)
      return raw;
    return unpack_gmm(raw, config_.gmm_components, config_.output_dim());
  }

  GmmParams gmm_from_raw(const Vec& raw, double pad = 0.0) const {
    GmmParams g = unpack_gmm(raw, config_.gmm_components, config_.output_dim());
    return pad > 0.0 ? pad_variances(std::move(g), pad) : g;
  }

  /// Sequence forward from a zero state (training path); does not touch the
  /// streaming state.
  std::vector<Vec> forward(const std::vector<Vec>& inputs, Tape* tape = nullptr,
                           StackState* final_state = nullptr) const {
    return net_.forward(inputs, tape, final_state);
  }

  void backward(const Tape& tape, const std::vector<Vec>& output_grads) {
    net_.backward(tape, output_grads);
  }

  /// Per-step loss against a target frame given the raw head output. When
  /// `grad_out` is non-null it receives d loss / d raw.
  double step_loss(const Vec& raw, const Vec& target, bool training,
                   Vec* grad_out = nullptr) const {
    if (config_.output_head == OutputHead::euclidean)
      return euclidean_loss(raw, target, grad_out);
    const double pad = training ? config_.variance_pad : 0.0;
    GmmParams g = gmm_from_raw(raw, pad);
    const double nll = gmm_nll(g, target);
    if (grad_out) *grad_out = pack_gmm_grads(gmm_nll_backward(g, target));
    return nll;
  }

  /// Summed loss over a window; fills per-step raw-output gradients.
  double sequence_loss(const std::vector<Vec>& raw_outputs,
                       const std::vector<Vec>& targets, bool training,
                       std::vector<Vec>* grads = nullptr) const {
    if (raw_outputs.size() != targets.size())
      throw ArgumentError("ErdModel::sequence_loss: length mismatch");
    double total = 0.0;
    if (grads) grads->resize(raw_outputs.size());
    for (std::size_t t = 0; t < raw_outputs.size(); ++t)
      total += step_loss(raw_outputs[t], targets[t], training,
                         grads ? &(*grads)[t] : nullptr);
    return total;
  }

  std::vector<NamedParam> named_parameters() {
    std::vector<NamedParam> out;
    std::size_t fc_i = 0, lstm_i = 0;
    const std::size_t n_layers = net_.layers().size();
    for (std::size_t li = 0; li < n_layers; ++li) {
      auto& l = net_.layers()[li];
      if (auto* fc = std::get_if<FcLayer>(&l)) {
        std::string name;
        if (fc_i < encoder_layers_)
          name = "encoder" + std::to_string(fc_i);
        else if (li + 1 == n_layers)
          name = "output";
        else
          name = "decoder" + std::to_string(fc_i - encoder_layers_);
        fc->append_parameters(name, out);
        ++fc_i;
      } else {
        std::get<LstmLayer>(l).append_parameters(
            "lstm" + std::to_string(lstm_i++), out);
      }
    }
    return out;
  }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    for (auto& np : named_parameters()) out.push_back(np.param);
    return out;
  }

 private:
  ErdConfig config_;
  LayerStack net_;
  StackState state_;
  std::size_t encoder_layers_ = 0;
};

/// Samples a next-frame vector from a raw head output.
inline Vec sample_from_raw(const ErdModel& model, const Vec& raw,
                           SampleMode mode, RandomStream& rng) {
  if (model.config().output_head == OutputHead::euclidean) return raw;
  return sample_output(model.gmm_from_raw(raw), mode, rng);
}

/// Runs the model over a prefix (resetting state first), discarding all
/// outputs except the last. Returns the raw head output at the final step:
/// the model's prediction of the first post-prefix frame.
inline Vec condition_on_prefix(ErdModel& model, const std::vector<Vec>& prefix) {
  if (prefix.empty()) throw ArgumentError("condition_on_prefix: empty prefix");
  model.reset_state();
  Vec raw;
  for (const Vec& x : prefix) raw = model.step_raw(x);
  return raw;
}

/// Closed-loop generation: each erd step's sampled output is fed back as the
/// next input. `first_input` is the sampled prediction handed over by
/// condition_on_prefix. Returns `steps` generated frames (standardized).
inline std::vector<Vec> unroll(ErdModel& model, const Vec& first_input,
                               std::size_t steps, SampleMode mode,
                               RandomStream& rng) {
  if (steps < 1) throw ArgumentError("unroll: steps must be >= 1");
  std::vector<Vec> out;
  out.reserve(steps);
  Vec x = first_input;
  for (std::size_t t = 0; t < steps; ++t) {
    Vec y;
    try {
      Vec raw = model.step_raw(x);
      y = sample_from_raw(model, raw, mode, rng);
    } catch (const NumericError& e) {
      throw NumericError("unroll: step " + std::to_string(t + 1) + ": " +
                         e.what());
    }
    if (!all_finite(y))
      throw NumericError("unroll: non-finite output at step " +
                         std::to_string(t + 1));
    out.push_back(y);
    x = out.back();
  }
  return out;
}

/// condition + unroll in one call: returns exactly `steps` frames where
/// frame k (1-based) is the model's prediction of prefix-end + k.
inline std::vector<Vec> generate_continuation(ErdModel& model,
                                              const std::vector<Vec>& prefix,
                                              std::size_t steps,
                                              SampleMode mode,
                                              RandomStream& rng) {
  if (steps < 1) throw ArgumentError("generate_continuation: steps must be >= 1");
  Vec raw = condition_on_prefix(model, prefix);
  std::vector<Vec> out;
  out.reserve(steps);
  out.push_back(sample_from_raw(model, raw, mode, rng));
  if (!all_finite(out.back()))
    throw NumericError("generate_continuation: non-finite output at step 1");
  if (steps > 1) {
    std::vector<Vec> rest = unroll(model, out.back(), steps - 1, mode, rng);
    out.insert(out.end(), rest.begin(), rest.end());
  }
  return out;
}

}  // namespace erd
