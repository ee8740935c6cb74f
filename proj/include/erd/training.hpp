#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "erd/mocap.hpp"
#include "erd/model.hpp"
#include "erd/optim.hpp"

namespace erd {

struct TrainOptions {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t epochs = 200;
  std::size_t window_len = 100;
  std::size_t stride = 50;
  double clip_threshold = 25.0;
  NoiseSchedule noise;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct EpochLog {
  std::size_t epoch = 0;
  double sigma = 0.0;
  double mean_loss = 0.0;  // per predicted frame
};

/// SGD + BPTT training loop over standardized sequences, with the denoising
/// curriculum: inputs are corrupted with the per-epoch noise level, targets
/// stay clean. Windows restart from a zero recurrent state (truncated BPTT).
/// Fully deterministic for a fixed seed.
inline std::vector<EpochLog> train_model(
    ErdModel& model, const std::vector<std::vector<Vec>>& sequences,
    const TrainOptions& opt,
    const std::function<void(const EpochLog&)>& on_epoch = nullptr) {
  if (sequences.empty()) throw ArgumentError("train_model: no sequences");
  if (opt.epochs == 0) throw ArgumentError("train_model: epochs must be >= 1");

  std::vector<Window> windows;
  for (const auto& seq : sequences) {
    auto w = make_windows(seq, opt.window_len, opt.stride);
    windows.insert(windows.end(), std::make_move_iterator(w.begin()),
                   std::make_move_iterator(w.end()));
  }
  if (windows.empty()) throw ArgumentError("train_model: no training windows");

  auto params = model.parameters();
  RandomStream noise_rng = RandomStream::derive(opt.seed, stream::noise);
  RandomStream shuffle_rng = RandomStream::derive(opt.seed, stream::shuffle);

  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochLog> logs;
  logs.reserve(opt.epochs);
  Tape tape;
  std::vector<Vec> grads;

  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    const double sigma = noise_sigma(opt.noise, epoch, opt.epochs);
    if (opt.shuffle) shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t frame_count = 0;
    for (std::size_t wi : order) {
      const Window& w = windows[wi];
      std::vector<Vec> inputs;
      inputs.reserve(w.inputs.size());
      for (const Vec& f : w.inputs) inputs.push_back(corrupt(f, sigma, noise_rng));

      double loss;
      try {
        auto raw = model.forward(inputs, &tape);
        loss = model.sequence_loss(raw, w.targets, true, &grads);
      } catch (const NumericError& e) {
        throw NumericError("train_model: epoch " + std::to_string(epoch) +
                           ": " + e.what());
      }
      if (!std::isfinite(loss))
        throw NumericError("train_model: non-finite loss in epoch " +
                           std::to_string(epoch));
      model.backward(tape, grads);
      clip_gradients(params, opt.clip_threshold);
      sgd_momentum_step(params, opt.learning_rate, opt.momentum);

      loss_sum += loss;
      frame_count += w.targets.size();
    }

    EpochLog log{epoch, sigma, loss_sum / static_cast<double>(frame_count)};
    if (on_epoch) on_epoch(log);
    logs.push_back(log);
  }
  return logs;
}

}  // namespace erd
