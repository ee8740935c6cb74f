#pragma once

#include <string>
#include <variant>
#include <vector>

#include "erd/fc.hpp"
#include "erd/lstm.hpp"

namespace erd {

/// Recurrent state of a stack: one LstmState per LSTM layer, in stack order.
struct StackState {
  std::vector<LstmState> lstm;
};

/// Per-timestep caches, indexed by occurrence order of each layer kind.
struct StepTape {
  std::vector<FcCache> fc;
  std::vector<LstmCache> lstm;
};

struct Tape {
  std::vector<StepTape> steps;
  void clear() { steps.clear(); }
};

/// An ordered stack of fully connected and LSTM layers. This is the
/// substrate for the ERD assembly and the LSTM-3LR baseline: feedforward
/// layers are stateless, LSTM layers thread (h, c) across steps.
class LayerStack {
 public:
  using Layer = std::variant<FcLayer, LstmLayer>;

  void add_fc(std::size_t in_dim, std::size_t out_dim, Activation act) {
    layers_.emplace_back(FcLayer(in_dim, out_dim, act));
  }
  void add_lstm(std::size_t in_dim, std::size_t hidden, bool peepholes = false) {
    layers_.emplace_back(LstmLayer(in_dim, hidden, peepholes));
  }

  std::size_t layer_count() const { return layers_.size(); }
  std::size_t lstm_layer_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_)
      if (std::holds_alternative<LstmLayer>(l)) ++n;
    return n;
  }

  std::size_t input_dim() const {
    if (layers_.empty()) return 0;
    if (const auto* fc = std::get_if<FcLayer>(&layers_.front()))
      return fc->in_dim();
    return std::get<LstmLayer>(layers_.front()).input_size();
  }
  std::size_t output_dim() const {
    if (layers_.empty()) return 0;
    if (const auto* fc = std::get_if<FcLayer>(&layers_.back()))
      return fc->out_dim();
    return std::get<LstmLayer>(layers_.back()).hidden_size();
  }

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  void init_weights(RandomStream& rng) {
    for (auto& l : layers_)
      std::visit([&](auto& layer) { layer.init_weights(rng); }, l);
  }

  StackState zero_state() const {
    StackState s;
    for (const auto& l : layers_)
      if (const auto* lstm = std::get_if<LstmLayer>(&l))
        s.lstm.push_back(lstm->zero_state());
    return s;
  }

  /// One step through the whole stack; advances `state` in place.
  Vec step(const Vec& x, StackState& state, StepTape* tape = nullptr) const {
    Vec h = x;
    std::size_t li = 0;
    if (tape) {
      tape->fc.clear();
      tape->lstm.clear();
    }
    for (const auto& l : layers_) {
      if (const auto* fc = std::get_if<FcLayer>(&l)) {
        if (tape) {
          tape->fc.emplace_back();
          h = fc->forward(h, &tape->fc.back());
        } else {
          h = fc->forward(h);
        }
      } else {
        const auto& lstm = std::get<LstmLayer>(l);
        LstmCache* cache = nullptr;
        if (tape) {
          tape->lstm.emplace_back();
          cache = &tape->lstm.back();
        }
        LstmState next = lstm.step(h, state.lstm[li], cache);
        h = next.hidden;
        state.lstm[li] = std::move(next);
        ++li;
      }
    }
    return h;
  }

  /// Runs the stack over a sequence from a zero recurrent state. Returns the
  /// per-step outputs; fills `tape` for the backward pass when given and
  /// `final_state` with the state after the last step.
  std::vector<Vec> forward(const std::vector<Vec>& inputs, Tape* tape = nullptr,
                           StackState* final_state = nullptr) const {
    if (inputs.empty())
      throw ArgumentError("LayerStack::forward: empty input sequence");
    StackState state = zero_state();
    std::vector<Vec> outputs;
    outputs.reserve(inputs.size());
    if (tape) {
      tape->clear();
      tape->steps.resize(inputs.size());
    }
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      if (inputs[t].size() != inputs[0].size())
        throw ShapeError("LayerStack::forward: ragged input dimensions");
      outputs.push_back(step(inputs[t], state, tape ? &tape->steps[t] : nullptr));
    }
    if (final_state) *final_state = std::move(state);
    return outputs;
  }

  /// Backpropagation through time. Accumulates exact gradients of
  /// sum_t loss_t into every parameter, given d loss / d output_t.
  void backward(const Tape& tape, const std::vector<Vec>& output_grads) {
    if (tape.steps.size() != output_grads.size())
      throw ArgumentError("LayerStack::backward: tape/grad length mismatch");
    if (tape.steps.empty()) return;

    // carried recurrent gradients, one (dh, dc) per LSTM layer
    std::vector<Vec> dh_carry, dc_carry;
    for (const auto& l : layers_)
      if (const auto* lstm = std::get_if<LstmLayer>(&l)) {
        dh_carry.emplace_back(lstm->hidden_size(), 0.0);
        dc_carry.emplace_back(lstm->hidden_size(), 0.0);
      }

    for (std::size_t ti = tape.steps.size(); ti-- > 0;) {
      const StepTape& st = tape.steps[ti];
      Vec d = output_grads[ti];
      std::size_t fc_i = st.fc.size();
      std::size_t lstm_i = st.lstm.size();
      for (std::size_t li = layers_.size(); li-- > 0;) {
        if (auto* fc = std::get_if<FcLayer>(&layers_[li])) {
          --fc_i;
          d = fc->backward(d, st.fc[fc_i]);
        } else {
          --lstm_i;
          auto& lstm = std::get<LstmLayer>(layers_[li]);
          Vec dh_total = d;
          for (std::size_t u = 0; u < dh_total.size(); ++u)
            dh_total[u] += dh_carry[lstm_i][u];
          Vec dh_prev, dc_prev;
          d = lstm.backward_step(dh_total, dc_carry[lstm_i], st.lstm[lstm_i],
                                 dh_prev, dc_prev);
          dh_carry[lstm_i] = std::move(dh_prev);
          dc_carry[lstm_i] = std::move(dc_prev);
        }
      }
    }
  }

  std::vector<NamedParam> named_parameters() {
    std::vector<NamedParam> out;
    std::size_t fc_i = 0, lstm_i = 0;
    for (auto& l : layers_) {
      if (auto* fc = std::get_if<FcLayer>(&l))
        fc->append_parameters("fc" + std::to_string(fc_i++), out);
      else
        std::get<LstmLayer>(l).append_parameters(
            "lstm" + std::to_string(lstm_i++), out);
    }
    return out;
  }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    for (auto& np : named_parameters()) out.push_back(np.param);
    return out;
  }

 private:
  std::vector<Layer> layers_;
};

}  // namespace erd
