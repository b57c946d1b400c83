#pragma once

#include <cstdint>
#include <vector>

#include "aeroforecast/layers.hpp"
#include "aeroforecast/normalization.hpp"

namespace aero {

// Architecture hyperparameters. Defaults are the reference configuration:
// Conv1D(64, k=3) + ReLU + MaxPool(2) -> LSTM(64, full sequence) ->
// LSTM(60, last state) -> Dense(30) + ReLU -> Dense(10) + ReLU -> Dense(1).
struct ModelConfig {
  std::size_t conv_filters = 64;
  std::size_t kernel_size = 3;
  std::size_t pool_width = 2;
  std::size_t lstm1_units = 64;
  std::size_t lstm2_units = 60;
  std::size_t dense1_units = 30;
  std::size_t dense2_units = 10;
  std::size_t lookback = 8;
  std::size_t feature_count = 0;  // derived from the pipeline

  // Time steps surviving conv + pool: (lookback - kernel + 1) / pool.
  std::size_t pooled_steps() const;
  void validate() const;  // throws ValidationError stating the arithmetic
};

// The built layer stack. forward() maps a normalized [lookback, features]
// input to a normalized scalar prediction and caches activations;
// backward() pushes d(loss)/d(prediction) through the stack, accumulating
// parameter gradients, and returns the gradient w.r.t. the input.
class Model {
 public:
  Model(const ModelConfig& cfg, NormalizationStats stats, std::uint64_t seed);

  double forward(const Tensor& x);
  Tensor backward(double dpred);
  void zero_grads();

  // forward() + rescale to physical units via the target feature stats.
  double predict_physical(const Tensor& x);

  // Fixed traversal order, congruent between the two lists; the same order
  // the serializer uses.
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::vector<Tensor*> gradients();
  // Parameters grouped per trainable layer: conv, lstm1, lstm2, fc1, fc2, fc3.
  std::vector<std::vector<Tensor*>> layer_parameters();

  std::size_t parameter_count() const;

  const ModelConfig& config() const { return cfg_; }
  const NormalizationStats& stats() const { return stats_; }

  // introspection for tests and tooling
  const Conv1dLayer& conv() const { return conv_; }
  const ReluLayer& conv_relu() const { return relu0_; }
  const MaxPool1dLayer& pool() const { return pool_; }
  const LstmLayer& lstm1() const { return lstm1_; }
  const LstmLayer& lstm2() const { return lstm2_; }
  const ReluLayer& dense1_relu() const { return relu1_; }
  const ReluLayer& dense2_relu() const { return relu2_; }

 private:
  ModelConfig cfg_;
  NormalizationStats stats_;
  Rng init_rng_;  // consumed by the layer initializers below, in order
  Conv1dLayer conv_;
  ReluLayer relu0_;
  MaxPool1dLayer pool_;
  LstmLayer lstm1_;
  LstmLayer lstm2_;
  DenseLayer fc1_;
  ReluLayer relu1_;
  DenseLayer fc2_;
  ReluLayer relu2_;
  DenseLayer fc3_;
};

// Builds the stack with Glorot-uniform weights from the seeded generator and
// zero biases. Equal seeds give bitwise-identical parameters.
Model build_model(const ModelConfig& cfg, const NormalizationStats& stats,
                  std::uint64_t seed);

}  // namespace aero
