#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aeroforecast/tensor.hpp"

namespace aero {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Parameter-update rule applied after each batch. Adam moment accumulators
// are allocated on the first step and stay congruent with the parameter list;
// the step counter increments by exactly one per call.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg);

  // params and grads must be parallel lists of shape-congruent tensors.
  // SGD: p -= lr * g. Adam: standard bias-corrected moment update.
  // Non-finite gradients throw NumericError.
  void step(std::span<Tensor* const> params, std::span<const Tensor* const> grads);

  std::uint64_t step_count() const { return t_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  OptimizerConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<Tensor> m_;  // first moments
  std::vector<Tensor> v_;  // second moments
};

// Scales all gradients in place by threshold / norm when their global L2 norm
// exceeds the threshold. A threshold of 0 disables clipping. Returns the
// pre-clip norm.
double clip_global_norm(std::span<Tensor* const> grads, double threshold);

}  // namespace aero
