#include "aeroforecast/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "aeroforecast/serialize.hpp"

namespace aero {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ValidationError("batch size must be at least 1");
  if (clip_norm < 0.0) throw ValidationError("clip threshold must be non-negative");
  Optimizer probe(optimizer);  // validates optimizer settings
  (void)probe;
}

MseLoss mse_loss(double pred, double target) {
  ensure_finite(pred, "mse_loss pred");
  ensure_finite(target, "mse_loss target");
  double d = pred - target;
  return {d * d, 2.0 * d};
}

double evaluate_loss(Model& model, const SampleSet& samples) {
  if (samples.size() == 0) {
    throw ValidationError("cannot evaluate loss on an empty sample set");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double pred = model.forward(samples.inputs[i]);
    total += mse_loss(pred, samples.targets[i]).loss;
  }
  return total / static_cast<double>(samples.size());
}

TrainReport train(Model& model, const SampleSet& train_set, const SampleSet& val_set,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0 || val_set.size() == 0) {
    throw ValidationError("train and validation sets must be non-empty");
  }

  Optimizer opt(cfg.optimizer);
  Rng shuffle_rng(cfg.seed);
  std::vector<Tensor*> params = model.parameters();
  std::vector<Tensor*> grads = model.gradients();
  std::vector<const Tensor*> grads_const(grads.begin(), grads.end());

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  auto run_start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto epoch_start = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t batch_start = 0, batch_idx = 0; batch_start < order.size();
         batch_start += cfg.batch_size, ++batch_idx) {
      std::size_t batch_end = std::min(batch_start + cfg.batch_size, order.size());
      double inv_batch = 1.0 / static_cast<double>(batch_end - batch_start);

      try {
        model.zero_grads();
        for (std::size_t k = batch_start; k < batch_end; ++k) {
          std::size_t i = order[k];
          double pred = model.forward(train_set.inputs[i]);
          MseLoss l = mse_loss(pred, train_set.targets[i]);
          epoch_loss += l.loss;
          model.backward(l.grad * inv_batch);
        }
        clip_global_norm(grads, cfg.clip_norm);
        opt.step(params, grads_const);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) +
                           ", batch " + std::to_string(batch_idx + 1) + ": " + e.what());
      }
    }

    EpochStats stats;
    stats.train_loss = epoch_loss / static_cast<double>(order.size());
    stats.val_loss = evaluate_loss(model, val_set);
    if (!std::isfinite(stats.train_loss) || !std::isfinite(stats.val_loss)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch + 1));
    }
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start)
            .count();
    report.epochs.push_back(stats);
  }

  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
  report.final_params_crc = params_crc32(model);
  return report;
}

}  // namespace aero
