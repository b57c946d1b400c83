#include "aeroforecast/model.hpp"

#include <string>

namespace aero {

std::size_t ModelConfig::pooled_steps() const {
  if (lookback < kernel_size || pool_width == 0) return 0;
  return (lookback - kernel_size + 1) / pool_width;
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ValidationError(std::string(name) + " must be positive");
  };
  positive(conv_filters, "conv_filters");
  positive(kernel_size, "kernel_size");
  positive(pool_width, "pool_width");
  positive(lstm1_units, "lstm1_units");
  positive(lstm2_units, "lstm2_units");
  positive(dense1_units, "dense1_units");
  positive(dense2_units, "dense2_units");
  positive(lookback, "lookback");
  positive(feature_count, "feature_count");
  if (lookback < kernel_size || pooled_steps() < 1) {
    throw ValidationError(
        "no time steps survive conv and pool: (lookback " + std::to_string(lookback) +
        " - kernel " + std::to_string(kernel_size) + " + 1) / pool " +
        std::to_string(pool_width) + " = " +
        std::to_string(lookback >= kernel_size ? pooled_steps() : 0) +
        ", need at least 1");
  }
}

namespace {

const ModelConfig& validated(const ModelConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Model::Model(const ModelConfig& cfg, NormalizationStats stats, std::uint64_t seed)
    : cfg_(validated(cfg)),
      stats_(std::move(stats)),
      init_rng_(seed),
      conv_(cfg_.feature_count, cfg_.conv_filters, cfg_.kernel_size, init_rng_),
      pool_(cfg_.pool_width),
      lstm1_(cfg_.conv_filters, cfg_.lstm1_units, /*return_full_sequence=*/true, init_rng_),
      lstm2_(cfg_.lstm1_units, cfg_.lstm2_units, /*return_full_sequence=*/false, init_rng_),
      fc1_(cfg_.lstm2_units, cfg_.dense1_units, init_rng_),
      fc2_(cfg_.dense1_units, cfg_.dense2_units, init_rng_),
      fc3_(cfg_.dense2_units, 1, init_rng_) {}

double Model::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(0) != cfg_.lookback || x.dim(1) != cfg_.feature_count) {
    throw DimensionError("model forward: input " + x.shape_str() + " does not match [" +
                         std::to_string(cfg_.lookback) + "," +
                         std::to_string(cfg_.feature_count) + "]");
  }
  Tensor h = conv_.forward(x);
  h = relu0_.forward(h);
  h = pool_.forward(h);
  h = lstm1_.forward(h);
  h = lstm2_.forward(h);
  h = fc1_.forward(h);
  h = relu1_.forward(h);
  h = fc2_.forward(h);
  h = relu2_.forward(h);
  h = fc3_.forward(h);
  return h.at(0);
}

Tensor Model::backward(double dpred) {
  ensure_finite(dpred, "model backward upstream");
  Tensor g({1}, {dpred});
  g = fc3_.backward(g);
  g = relu2_.backward(g);
  g = fc2_.backward(g);
  g = relu1_.backward(g);
  g = fc1_.backward(g);
  g = lstm2_.backward(g);
  g = lstm1_.backward(g);
  g = pool_.backward(g);
  g = relu0_.backward(g);
  return conv_.backward(g);
}

void Model::zero_grads() {
  conv_.zero_grads();
  lstm1_.zero_grads();
  lstm2_.zero_grads();
  fc1_.zero_grads();
  fc2_.zero_grads();
  fc3_.zero_grads();
}

double Model::predict_physical(const Tensor& x) {
  return rescale(forward(x), stats_.target());
}

std::vector<Tensor*> Model::parameters() {
  std::vector<Tensor*> out;
  for (auto& group : layer_parameters()) {
    out.insert(out.end(), group.begin(), group.end());
  }
  return out;
}

std::vector<const Tensor*> Model::parameters() const {
  auto groups = const_cast<Model*>(this)->layer_parameters();
  std::vector<const Tensor*> out;
  for (auto& group : groups) {
    out.insert(out.end(), group.begin(), group.end());
  }
  return out;
}

std::vector<Tensor*> Model::gradients() {
  std::vector<Tensor*> out;
  auto push_lstm = [&out](LstmParams& p) {
    for (std::size_t g = 0; g < 4; ++g) {
      out.push_back(&p.w[g]);
      out.push_back(&p.u[g]);
      out.push_back(&p.b[g]);
    }
  };
  out.push_back(&conv_.grads().weights);
  out.push_back(&conv_.grads().bias);
  push_lstm(lstm1_.grads());
  push_lstm(lstm2_.grads());
  out.push_back(&fc1_.grads().weights);
  out.push_back(&fc1_.grads().bias);
  out.push_back(&fc2_.grads().weights);
  out.push_back(&fc2_.grads().bias);
  out.push_back(&fc3_.grads().weights);
  out.push_back(&fc3_.grads().bias);
  return out;
}

std::vector<std::vector<Tensor*>> Model::layer_parameters() {
  std::vector<std::vector<Tensor*>> groups;
  auto lstm_group = [](LstmParams& p) {
    std::vector<Tensor*> g;
    for (std::size_t i = 0; i < 4; ++i) {
      g.push_back(&p.w[i]);
      g.push_back(&p.u[i]);
      g.push_back(&p.b[i]);
    }
    return g;
  };
  groups.push_back({&conv_.params().weights, &conv_.params().bias});
  groups.push_back(lstm_group(lstm1_.params()));
  groups.push_back(lstm_group(lstm2_.params()));
  groups.push_back({&fc1_.params().weights, &fc1_.params().bias});
  groups.push_back({&fc2_.params().weights, &fc2_.params().bias});
  groups.push_back({&fc3_.params().weights, &fc3_.params().bias});
  return groups;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : parameters()) n += t->size();
  return n;
}

Model build_model(const ModelConfig& cfg, const NormalizationStats& stats,
                  std::uint64_t seed) {
  return Model(cfg, stats, seed);
}

}  // namespace aero
