#include "aeroforecast/optimizer.hpp"

#include <cmath>
#include <string>

namespace aero {

Optimizer::Optimizer(OptimizerConfig cfg) : cfg_(cfg) {
  if (!(cfg_.learning_rate >= 0.0)) {
    throw ValidationError("optimizer: learning rate must be non-negative");
  }
  if (cfg_.kind == OptimizerKind::adam &&
      (cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0 || cfg_.beta2 < 0.0 || cfg_.beta2 >= 1.0 ||
       cfg_.epsilon <= 0.0)) {
    throw ValidationError("optimizer: adam requires beta1, beta2 in [0,1) and epsilon > 0");
  }
}

void Optimizer::step(std::span<Tensor* const> params,
                     std::span<const Tensor* const> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("optimizer step: " + std::to_string(params.size()) +
                         " params vs " + std::to_string(grads.size()) + " grads");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i])) {
      throw DimensionError("optimizer step: param " + params[i]->shape_str() +
                           " does not match grad " + grads[i]->shape_str());
    }
    for (double g : grads[i]->data()) {
      if (!std::isfinite(g)) {
        throw NumericError("optimizer step: non-finite gradient in tensor " +
                           std::to_string(i));
      }
    }
  }

  if (cfg_.kind == OptimizerKind::adam && m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  }
  if (cfg_.kind == OptimizerKind::adam && m_.size() != params.size()) {
    throw DimensionError("optimizer step: parameter list changed size mid-run");
  }

  t_ += 1;
  double lr = cfg_.learning_rate;

  if (cfg_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto p = params[i]->data();
      auto g = grads[i]->data();
      for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
    }
    return;
  }

  double corr1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double corr2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->data();
    auto g = grads[i]->data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      double m_hat = m[j] / corr1;
      double v_hat = v[j] / corr2;
      p[j] -= lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }
}

double clip_global_norm(std::span<Tensor* const> grads, double threshold) {
  double sq = 0.0;
  for (const Tensor* g : grads) {
    for (double x : g->data()) sq += x * x;
  }
  double norm = std::sqrt(sq);
  if (threshold > 0.0 && norm > threshold) {
    double factor = threshold / norm;
    for (Tensor* g : grads) {
      for (double& x : g->data()) x *= factor;
    }
  }
  return norm;
}

}  // namespace aero
