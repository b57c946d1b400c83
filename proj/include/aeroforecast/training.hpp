#pragma once

#include <cstdint>
#include <vector>

#include "aeroforecast/data_pipeline.hpp"
#include "aeroforecast/model.hpp"
#include "aeroforecast/optimizer.hpp"

namespace aero {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  double clip_norm = 5.0;  // global L2 threshold, 0 disables
  std::uint64_t seed = 42;
  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;  // mean normalized MSE over the epoch's samples
  double val_loss = 0.0;
  double wall_seconds = 0.0;  // informational; excluded from determinism checks
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double total_seconds = 0.0;
  std::uint32_t final_params_crc = 0;
};

struct MseLoss {
  double loss;
  double grad;  // d(loss)/d(pred) = 2 (pred - target)
};

// Squared error on the normalized scale. The model head is compared against
// normalized targets; rescaling to physical units happens only for reporting.
MseLoss mse_loss(double pred, double target);

// Mean normalized MSE over a sample set, forward passes only.
double evaluate_loss(Model& model, const SampleSet& samples);

// Mini-batch loop: per epoch, shuffle with the seeded generator, then for
// each batch accumulate mean gradients, clip the global norm and step the
// optimizer; afterwards evaluate the validation loss without updating.
// The last partial batch is kept. Non-finite losses throw NumericError
// naming the epoch and batch.
TrainReport train(Model& model, const SampleSet& train_set, const SampleSet& val_set,
                  const TrainConfig& cfg);

}  // namespace aero
