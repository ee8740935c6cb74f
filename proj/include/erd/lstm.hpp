#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "erd/matrix.hpp"
#include "erd/random.hpp"

namespace erd {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LstmState {
  Vec hidden, cell;
};

/// Everything the backward pass needs about one forward step.
struct LstmCache {
  Vec input, h_prev, c_prev;
  Vec gate_i, gate_f, gate_o, gate_g;  // post-nonlinearity gate values
  Vec cell, cell_tanh;                 // new cell state and tanh of it
};

/// Standard LSTM cell:
///   i = sigma(Wxi x + Whi h + bi)      f, o analogous
///   g = tanh (Wxg x + Whg h + bg)
///   c' = f*c + i*g,  h' = o * tanh(c')
/// Optional diagonal peephole connections (i and f read c, o reads c') sit
/// behind a constructor flag and default off.
class LstmLayer {
 public:
  enum Gate { I = 0, F = 1, O = 2, G = 3 };

  LstmLayer() = default;
  LstmLayer(std::size_t input_size, std::size_t hidden_size,
            bool peepholes = false)
      : input_size_(input_size), hidden_size_(hidden_size), peep_(peepholes) {
    for (int k = 0; k < 4; ++k) {
      wx_[k] = Parameter(hidden_size, input_size);
      wh_[k] = Parameter(hidden_size, hidden_size);
      b_[k] = Parameter(hidden_size, 1);
    }
    if (peep_)
      for (int k = 0; k < 3; ++k) p_[k] = Parameter(hidden_size, 1);
  }

  /// Input/recurrent weights uniform in [-s, s] with s = sqrt(6/(fan_in +
  /// fan_out)); biases zero except the forget gate bias at 1.0.
  void init_weights(RandomStream& rng) {
    const double sx =
        std::sqrt(6.0 / static_cast<double>(input_size_ + hidden_size_));
    const double sh = std::sqrt(6.0 / static_cast<double>(2 * hidden_size_));
    for (int k = 0; k < 4; ++k) {
      for (double& v : wx_[k].value.values()) v = rng.uniform(-sx, sx);
      for (double& v : wh_[k].value.values()) v = rng.uniform(-sh, sh);
      b_[k].value.fill(0.0);
    }
    b_[F].value.fill(1.0);
    if (peep_)
      for (int k = 0; k < 3; ++k) p_[k].value.fill(0.0);
  }

  LstmState zero_state() const {
    return {Vec(hidden_size_, 0.0), Vec(hidden_size_, 0.0)};
  }

  LstmState step(const Vec& x, const LstmState& prev,
                 LstmCache* cache = nullptr) const {
    if (x.size() != input_size_)
      throw ShapeError("LstmLayer::step: input length " +
                       std::to_string(x.size()) + " != " +
                       std::to_string(input_size_));
    if (prev.hidden.size() != hidden_size_ || prev.cell.size() != hidden_size_)
      throw ShapeError("LstmLayer::step: state size mismatch");

    std::array<Vec, 4> pre;
    for (int k = 0; k < 4; ++k) {
      matvec(wx_[k].value, x, pre[k]);
      matvec_add(wh_[k].value, prev.hidden, pre[k]);
      for (std::size_t u = 0; u < hidden_size_; ++u)
        pre[k][u] += b_[k].value(u, 0);
    }
    if (peep_) {
      for (std::size_t u = 0; u < hidden_size_; ++u) {
        pre[I][u] += p_[0].value(u, 0) * prev.cell[u];
        pre[F][u] += p_[1].value(u, 0) * prev.cell[u];
      }
    }

    Vec gi(hidden_size_), gf(hidden_size_), gg(hidden_size_);
    for (std::size_t u = 0; u < hidden_size_; ++u) {
      gi[u] = sigmoid(pre[I][u]);
      gf[u] = sigmoid(pre[F][u]);
      gg[u] = std::tanh(pre[G][u]);
    }
    Vec c(hidden_size_);
    for (std::size_t u = 0; u < hidden_size_; ++u)
      c[u] = gf[u] * prev.cell[u] + gi[u] * gg[u];

    if (peep_)
      for (std::size_t u = 0; u < hidden_size_; ++u)
        pre[O][u] += p_[2].value(u, 0) * c[u];
    Vec go(hidden_size_), ct(hidden_size_), h(hidden_size_);
    for (std::size_t u = 0; u < hidden_size_; ++u) {
      go[u] = sigmoid(pre[O][u]);
      ct[u] = std::tanh(c[u]);
      h[u] = go[u] * ct[u];
    }

    for (std::size_t u = 0; u < hidden_size_; ++u)
      if (!std::isfinite(h[u]) || !std::isfinite(c[u]))
        throw NumericError("LstmLayer::step: non-finite state");

    if (cache) {
      cache->input = x;
      cache->h_prev = prev.hidden;
      cache->c_prev = prev.cell;
      cache->gate_i = gi;
      cache->gate_f = gf;
      cache->gate_o = go;
      cache->gate_g = gg;
      cache->cell = c;
      cache->cell_tanh = ct;
    }
    return {std::move(h), std::move(c)};
  }

  /// One BPTT step. dh_total is the full gradient w.r.t. h_t (output path +
  /// recurrence from t+1); dc_in the carried cell gradient. Accumulates
  /// parameter gradients, writes dh_prev/dc_prev and returns the input grad.
  Vec backward_step(const Vec& dh_total, const Vec& dc_in,
                    const LstmCache& cc, Vec& dh_prev, Vec& dc_prev) {
    const std::size_t n = hidden_size_;
    if (dh_total.size() != n || dc_in.size() != n)
      throw ShapeError("LstmLayer::backward_step: grad size mismatch");

    Vec dpre_o(n), dc(n), dpre_i(n), dpre_f(n), dpre_g(n);
    for (std::size_t u = 0; u < n; ++u) {
      const double o = cc.gate_o[u];
      dpre_o[u] = dh_total[u] * cc.cell_tanh[u] * o * (1.0 - o);
      dc[u] = dc_in[u] +
              dh_total[u] * o * (1.0 - cc.cell_tanh[u] * cc.cell_tanh[u]);
      if (peep_) dc[u] += dpre_o[u] * p_[2].value(u, 0);
    }
    for (std::size_t u = 0; u < n; ++u) {
      const double i = cc.gate_i[u], f = cc.gate_f[u], g = cc.gate_g[u];
      dpre_i[u] = dc[u] * g * i * (1.0 - i);
      dpre_f[u] = dc[u] * cc.c_prev[u] * f * (1.0 - f);
      dpre_g[u] = dc[u] * i * (1.0 - g * g);
    }

    dc_prev.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      dc_prev[u] = dc[u] * cc.gate_f[u];
      if (peep_)
        dc_prev[u] += dpre_i[u] * p_[0].value(u, 0) +
                      dpre_f[u] * p_[1].value(u, 0);
    }
    if (peep_) {
      for (std::size_t u = 0; u < n; ++u) {
        p_[0].grad(u, 0) += dpre_i[u] * cc.c_prev[u];
        p_[1].grad(u, 0) += dpre_f[u] * cc.c_prev[u];
        p_[2].grad(u, 0) += dpre_o[u] * cc.cell[u];
      }
    }

    const std::array<const Vec*, 4> dpre = {&dpre_i, &dpre_f, &dpre_o,
                                            &dpre_g};
    Vec dx(input_size_, 0.0);
    dh_prev.assign(n, 0.0);
    for (int k = 0; k < 4; ++k) {
      add_outer(wx_[k].grad, *dpre[k], cc.input);
      add_outer(wh_[k].grad, *dpre[k], cc.h_prev);
      for (std::size_t u = 0; u < n; ++u) b_[k].grad(u, 0) += (*dpre[k])[u];
      matvec_transpose_add(wx_[k].value, *dpre[k], dx);
      matvec_transpose_add(wh_[k].value, *dpre[k], dh_prev);
    }
    return dx;
  }

  std::size_t input_size() const { return input_size_; }
  std::size_t hidden_size() const { return hidden_size_; }
  bool uses_peepholes() const { return peep_; }

  Parameter& input_weights(Gate g) { return wx_[g]; }
  Parameter& recurrent_weights(Gate g) { return wh_[g]; }
  Parameter& bias(Gate g) { return b_[g]; }
  const Parameter& input_weights(Gate g) const { return wx_[g]; }
  const Parameter& recurrent_weights(Gate g) const { return wh_[g]; }
  const Parameter& bias(Gate g) const { return b_[g]; }

  void append_parameters(const std::string& prefix,
                         std::vector<NamedParam>& out) {
    static const char* gate_names[4] = {"i", "f", "o", "g"};
    for (int k = 0; k < 4; ++k) {
      out.push_back({prefix + ".wx_" + gate_names[k], &wx_[k]});
      out.push_back({prefix + ".wh_" + gate_names[k], &wh_[k]});
      out.push_back({prefix + ".b_" + gate_names[k], &b_[k]});
    }
    if (peep_) {
      out.push_back({prefix + ".peep_i", &p_[0]});
      out.push_back({prefix + ".peep_f", &p_[1]});
      out.push_back({prefix + ".peep_o", &p_[2]});
    }
  }

 private:
  std::size_t input_size_ = 0, hidden_size_ = 0;
  bool peep_ = false;
  std::array<Parameter, 4> wx_, wh_, b_;
  std::array<Parameter, 3> p_;
};

}  // namespace erd
