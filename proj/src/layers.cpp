#include "aeroforecast/layers.hpp"

#include <cmath>
#include <string>

namespace aero {

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void init_glorot(Tensor& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double b = glorot_bound(fan_in, fan_out);
  for (double& x : w.data()) x = rng.uniform(-b, b);
}

// ---------------------------------------------------------------------------
// conv1d
// ---------------------------------------------------------------------------

namespace {

void check_conv_input(const Tensor& x, const Conv1dParams& p) {
  if (x.rank() != 2) {
    throw DimensionError("conv1d: input must be [T, C_in], got " + x.shape_str());
  }
  std::size_t k = p.weights.dim(2);
  if (x.dim(0) < k) {
    throw DimensionError("conv1d: sequence length " + std::to_string(x.dim(0)) +
                         " is shorter than kernel size " + std::to_string(k));
  }
  if (x.dim(1) != p.weights.dim(1)) {
    throw DimensionError("conv1d: input channels " + x.shape_str() +
                         " do not match weights " + p.weights.shape_str());
  }
}

}  // namespace

Tensor conv1d_forward(const Tensor& x, const Conv1dParams& p) {
  check_conv_input(x, p);
  std::size_t t_in = x.dim(0), c_in = x.dim(1);
  std::size_t out_ch = p.weights.dim(0), k = p.weights.dim(2);
  std::size_t t_out = t_in - k + 1;

  Tensor y({t_out, out_ch});
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      double acc = p.bias.at(o);
      for (std::size_t c = 0; c < c_in; ++c) {
        for (std::size_t j = 0; j < k; ++j) {
          acc += x(t + j, c) * p.weights(o, c, j);
        }
      }
      y(t, o) = acc;
    }
  }
  ensure_finite(y, "conv1d_forward");
  return y;
}

Conv1dLayer::Conv1dLayer(std::size_t in_channels, std::size_t out_channels,
                         std::size_t kernel, Rng& rng)
    : in_channels_(in_channels), out_channels_(out_channels), kernel_(kernel) {
  if (in_channels == 0 || out_channels == 0 || kernel == 0) {
    throw ValidationError("conv1d: channel counts and kernel size must be positive");
  }
  p_.weights = Tensor({out_channels, in_channels, kernel});
  p_.bias = Tensor({out_channels});
  init_glorot(p_.weights, in_channels * kernel, out_channels * kernel, rng);
  g_.weights = Tensor({out_channels, in_channels, kernel});
  g_.bias = Tensor({out_channels});
}

Tensor Conv1dLayer::forward(const Tensor& x) {
  Tensor y = conv1d_forward(x, p_);
  cached_x_ = x;
  has_cache_ = true;
  return y;
}

Tensor Conv1dLayer::backward(const Tensor& upstream) {
  if (!has_cache_) throw ProtocolError("conv1d backward before forward");
  const Tensor& x = cached_x_;
  std::size_t t_in = x.dim(0), c_in = x.dim(1);
  std::size_t t_out = t_in - kernel_ + 1;
  if (upstream.rank() != 2 || upstream.dim(0) != t_out || upstream.dim(1) != out_channels_) {
    throw DimensionError("conv1d backward: upstream " + upstream.shape_str() +
                         " does not match output [" + std::to_string(t_out) + "," +
                         std::to_string(out_channels_) + "]");
  }

  Tensor dx({t_in, c_in});
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t o = 0; o < out_channels_; ++o) {
      double u = upstream(t, o);
      g_.bias.at(o) += u;
      for (std::size_t c = 0; c < c_in; ++c) {
        for (std::size_t j = 0; j < kernel_; ++j) {
          g_.weights(o, c, j) += u * x(t + j, c);
          dx(t + j, c) += u * p_.weights(o, c, j);
        }
      }
    }
  }
  ensure_finite(dx, "conv1d_backward");
  ensure_finite(g_.weights, "conv1d_backward");
  return dx;
}

void Conv1dLayer::zero_grads() {
  for (double& v : g_.weights.data()) v = 0.0;
  for (double& v : g_.bias.data()) v = 0.0;
}

// ---------------------------------------------------------------------------
// relu
// ---------------------------------------------------------------------------

Tensor ReluLayer::forward(const Tensor& x) {
  cached_x_ = x;
  has_cache_ = true;
  return relu(x);
}

Tensor ReluLayer::backward(const Tensor& upstream) {
  if (!has_cache_) throw ProtocolError("relu backward before forward");
  if (!upstream.same_shape(cached_x_)) {
    throw DimensionError("relu backward: upstream " + upstream.shape_str() +
                         " does not match input " + cached_x_.shape_str());
  }
  Tensor dx(cached_x_.shape());
  auto xs = cached_x_.data();
  auto us = upstream.data();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    dx.at(i) = xs[i] > 0.0 ? us[i] : 0.0;
  }
  return dx;
}

const Tensor& ReluLayer::cached_input() const {
  if (!has_cache_) throw ProtocolError("relu cache queried before forward");
  return cached_x_;
}

// ---------------------------------------------------------------------------
// maxpool1d
// ---------------------------------------------------------------------------

PoolResult maxpool1d_forward(const Tensor& x, std::size_t width, std::size_t stride) {
  if (x.rank() != 2) {
    throw DimensionError("maxpool1d: input must be [T, C], got " + x.shape_str());
  }
  if (width == 0 || stride == 0) {
    throw ValidationError("maxpool1d: width and stride must be positive");
  }
  std::size_t t_in = x.dim(0), channels = x.dim(1);
  if (t_in < width) {
    throw DimensionError("maxpool1d: sequence length " + std::to_string(t_in) +
                         " is shorter than pool width " + std::to_string(width));
  }
  std::size_t t_out = (t_in - width) / stride + 1;

  PoolResult r{Tensor({t_out, channels}), std::vector<std::size_t>(t_out * channels)};
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::size_t base = t * stride;
      double best = x(base, c);
      std::size_t best_row = base;
      for (std::size_t j = 1; j < width; ++j) {
        double v = x(base + j, c);
        if (v > best) {  // ties keep the lower index
          best = v;
          best_row = base + j;
        }
      }
      r.values(t, c) = best;
      r.argmax[t * channels + c] = best_row;
    }
  }
  return r;
}

Tensor MaxPool1dLayer::forward(const Tensor& x) {
  PoolResult r = maxpool1d_forward(x, width_, width_);
  cached_x_ = x;
  argmax_ = std::move(r.argmax);
  has_cache_ = true;
  return std::move(r.values);
}

Tensor MaxPool1dLayer::backward(const Tensor& upstream) {
  if (!has_cache_) throw ProtocolError("maxpool1d backward before forward");
  std::size_t channels = cached_x_.dim(1);
  std::size_t t_out = argmax_.size() / channels;
  if (upstream.rank() != 2 || upstream.dim(0) != t_out || upstream.dim(1) != channels) {
    throw DimensionError("maxpool1d backward: upstream " + upstream.shape_str() +
                         " does not match pooled output");
  }
  Tensor dx(cached_x_.shape());
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      dx(argmax_[t * channels + c], c) += upstream(t, c);
    }
  }
  return dx;
}

const Tensor& MaxPool1dLayer::cached_input() const {
  if (!has_cache_) throw ProtocolError("maxpool1d cache queried before forward");
  return cached_x_;
}

// ---------------------------------------------------------------------------
// lstm
// ---------------------------------------------------------------------------

namespace {

void check_lstm_params(const LstmParams& p) {
  std::size_t h = p.b[kForget].dim(0);
  std::size_t f = p.w[kForget].dim(1);
  for (std::size_t g = 0; g < 4; ++g) {
    if (p.w[g].rank() != 2 || p.u[g].rank() != 2 || p.b[g].rank() != 1 ||
        p.w[g].dim(0) != h || p.w[g].dim(1) != f || p.u[g].dim(0) != h ||
        p.u[g].dim(1) != h || p.b[g].dim(0) != h) {
      throw DimensionError("lstm: inconsistent gate parameter shapes");
    }
  }
}

// Core step shared by the pure op and the layer. Writes post-activation gate
// values, the new cell state, its tanh, and the new hidden state.
void lstm_step_core(const double* x, const double* h_prev, const double* c_prev,
                    const LstmParams& p, std::array<std::vector<double>, 4>& gates,
                    std::vector<double>& c_out, std::vector<double>& tanh_c,
                    std::vector<double>& h_out) {
  std::size_t hidden = p.hidden();
  std::size_t features = p.features();

  for (std::size_t g = 0; g < 4; ++g) {
    gates[g].assign(hidden, 0.0);
    const Tensor& w = p.w[g];
    const Tensor& u = p.u[g];
    const Tensor& b = p.b[g];
    for (std::size_t h = 0; h < hidden; ++h) {
      double a = b.at(h);
      for (std::size_t f = 0; f < features; ++f) a += w(h, f) * x[f];
      for (std::size_t k = 0; k < hidden; ++k) a += u(h, k) * h_prev[k];
      gates[g][h] = (g == kCandidate) ? std::tanh(a) : sigmoid(a);
    }
  }

  c_out.resize(hidden);
  tanh_c.resize(hidden);
  h_out.resize(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    c_out[h] = gates[kForget][h] * c_prev[h] + gates[kInput][h] * gates[kCandidate][h];
    tanh_c[h] = std::tanh(c_out[h]);
    h_out[h] = gates[kOutput][h] * tanh_c[h];
  }
}

}  // namespace

LstmState lstm_step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                    const LstmParams& p) {
  check_lstm_params(p);
  std::size_t hidden = p.hidden();
  if (x.rank() != 1 || x.dim(0) != p.features()) {
    throw DimensionError("lstm_step: input " + x.shape_str() + " does not match weights " +
                         p.w[kForget].shape_str());
  }
  if (h_prev.rank() != 1 || h_prev.dim(0) != hidden || c_prev.rank() != 1 ||
      c_prev.dim(0) != hidden) {
    throw DimensionError("lstm_step: state shapes " + h_prev.shape_str() + ", " +
                         c_prev.shape_str() + " do not match hidden size " +
                         std::to_string(hidden));
  }

  std::array<std::vector<double>, 4> gates;
  std::vector<double> c, tanh_c, h;
  lstm_step_core(x.data().data(), h_prev.data().data(), c_prev.data().data(), p,
                 gates, c, tanh_c, h);
  LstmState out{Tensor({hidden}, std::move(h)), Tensor({hidden}, std::move(c))};
  ensure_finite(out.h, "lstm_step");
  ensure_finite(out.c, "lstm_step");
  return out;
}

Tensor lstm_forward(const Tensor& seq, const LstmParams& p, bool return_full_sequence) {
  check_lstm_params(p);
  if (seq.rank() != 2 || seq.dim(1) != p.features()) {
    throw DimensionError("lstm_forward: input " + seq.shape_str() +
                         " does not match feature count " + std::to_string(p.features()));
  }
  std::size_t length = seq.dim(0);
  std::size_t hidden = p.hidden();

  Tensor h_prev({hidden});
  Tensor c_prev({hidden});
  Tensor full({length, hidden});
  for (std::size_t t = 0; t < length; ++t) {
    Tensor x({seq.dim(1)});
    for (std::size_t f = 0; f < seq.dim(1); ++f) x.at(f) = seq(t, f);
    LstmState s = lstm_step(x, h_prev, c_prev, p);
    for (std::size_t h = 0; h < hidden; ++h) full(t, h) = s.h.at(h);
    h_prev = std::move(s.h);
    c_prev = std::move(s.c);
  }
  if (return_full_sequence) return full;
  return h_prev;
}

LstmLayer::LstmLayer(std::size_t in_features, std::size_t hidden,
                     bool return_full_sequence, Rng& rng)
    : in_features_(in_features), hidden_(hidden),
      return_full_sequence_(return_full_sequence) {
  if (in_features == 0 || hidden == 0) {
    throw ValidationError("lstm: feature and hidden sizes must be positive");
  }
  for (std::size_t g = 0; g < 4; ++g) {
    p_.w[g] = Tensor({hidden, in_features});
    p_.u[g] = Tensor({hidden, hidden});
    p_.b[g] = Tensor({hidden});
    init_glorot(p_.w[g], in_features, hidden, rng);
    init_glorot(p_.u[g], hidden, hidden, rng);
    g_.w[g] = Tensor({hidden, in_features});
    g_.u[g] = Tensor({hidden, hidden});
    g_.b[g] = Tensor({hidden});
  }
}

Tensor LstmLayer::forward(const Tensor& seq) {
  if (seq.rank() != 2 || seq.dim(1) != in_features_) {
    throw DimensionError("lstm forward: input " + seq.shape_str() + " does not match [L," +
                         std::to_string(in_features_) + "]");
  }
  if (seq.dim(0) == 0 || seq.empty()) {
    throw DimensionError("lstm forward: empty sequence");
  }
  std::size_t length = seq.dim(0);
  steps_.assign(length, StepCache{});

  std::vector<double> h_prev(hidden_, 0.0), c_prev(hidden_, 0.0);
  Tensor full({length, hidden_});
  for (std::size_t t = 0; t < length; ++t) {
    StepCache& s = steps_[t];
    s.x.resize(in_features_);
    for (std::size_t f = 0; f < in_features_; ++f) s.x[f] = seq(t, f);
    lstm_step_core(s.x.data(), h_prev.data(), c_prev.data(), p_, s.gates, s.c,
                   s.tanh_c, s.h);
    for (std::size_t h = 0; h < hidden_; ++h) full(t, h) = s.h[h];
    h_prev = s.h;
    c_prev = s.c;
  }
  has_cache_ = true;
  ensure_finite(full, "lstm_forward");
  if (return_full_sequence_) return full;
  Tensor last({hidden_});
  for (std::size_t h = 0; h < hidden_; ++h) last.at(h) = h_prev[h];
  return last;
}

Tensor LstmLayer::backward(const Tensor& upstream) {
  if (!has_cache_) throw ProtocolError("lstm backward before forward");
  std::size_t length = steps_.size();

  if (return_full_sequence_) {
    if (upstream.rank() != 2 || upstream.dim(0) != length || upstream.dim(1) != hidden_) {
      throw DimensionError("lstm backward: upstream " + upstream.shape_str() +
                           " does not match [L," + std::to_string(hidden_) + "]");
    }
  } else if (upstream.rank() != 1 || upstream.dim(0) != hidden_) {
    throw DimensionError("lstm backward: upstream " + upstream.shape_str() +
                         " does not match hidden size " + std::to_string(hidden_));
  }

  Tensor dx({length, in_features_});
  std::vector<double> dh_next(hidden_, 0.0), dc_next(hidden_, 0.0);
  std::vector<double> dh(hidden_), dc(hidden_);
  std::array<std::vector<double>, 4> da;
  for (auto& v : da) v.resize(hidden_);
  std::vector<double> dh_prev(hidden_);

  static const double kZero = 0.0;

  for (std::size_t ti = length; ti-- > 0;) {
    const StepCache& s = steps_[ti];
    const std::vector<double>* c_prev = ti > 0 ? &steps_[ti - 1].c : nullptr;
    const std::vector<double>* h_prev = ti > 0 ? &steps_[ti - 1].h : nullptr;

    for (std::size_t h = 0; h < hidden_; ++h) {
      double up = 0.0;
      if (return_full_sequence_) {
        up = upstream(ti, h);
      } else if (ti == length - 1) {
        up = upstream.at(h);
      }
      dh[h] = dh_next[h] + up;
      dc[h] = dc_next[h] + dh[h] * s.gates[kOutput][h] * (1.0 - s.tanh_c[h] * s.tanh_c[h]);

      double f = s.gates[kForget][h];
      double i = s.gates[kInput][h];
      double g = s.gates[kCandidate][h];
      double o = s.gates[kOutput][h];
      double cp = c_prev ? (*c_prev)[h] : kZero;

      da[kOutput][h] = dh[h] * s.tanh_c[h] * o * (1.0 - o);
      da[kForget][h] = dc[h] * cp * f * (1.0 - f);
      da[kInput][h] = dc[h] * g * i * (1.0 - i);
      da[kCandidate][h] = dc[h] * i * (1.0 - g * g);

      dc_next[h] = dc[h] * f;
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t g = 0; g < 4; ++g) {
      Tensor& gw = g_.w[g];
      Tensor& gu = g_.u[g];
      Tensor& gb = g_.b[g];
      const Tensor& w = p_.w[g];
      const Tensor& u = p_.u[g];
      for (std::size_t h = 0; h < hidden_; ++h) {
        double a = da[g][h];
        gb.at(h) += a;
        for (std::size_t f = 0; f < in_features_; ++f) {
          gw(h, f) += a * s.x[f];
          dx(ti, f) += a * w(h, f);
        }
        for (std::size_t k = 0; k < hidden_; ++k) {
          if (h_prev) gu(h, k) += a * (*h_prev)[k];
          dh_prev[k] += a * u(h, k);
        }
      }
    }
    dh_next = dh_prev;
  }

  ensure_finite(dx, "lstm_backward");
  return dx;
}

void LstmLayer::zero_grads() {
  for (std::size_t g = 0; g < 4; ++g) {
    for (double& v : g_.w[g].data()) v = 0.0;
    for (double& v : g_.u[g].data()) v = 0.0;
    for (double& v : g_.b[g].data()) v = 0.0;
  }
}

// ---------------------------------------------------------------------------
// dense
// ---------------------------------------------------------------------------

Tensor dense_forward(const Tensor& x, const DenseParams& p) {
  if (x.rank() != 1 || p.weights.rank() != 2 || x.dim(0) != p.weights.dim(1)) {
    throw DimensionError("dense: input " + x.shape_str() + " does not match weights " +
                         p.weights.shape_str());
  }
  std::size_t out = p.weights.dim(0), in = p.weights.dim(1);
  Tensor y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double acc = p.bias.at(o);
    for (std::size_t i = 0; i < in; ++i) acc += p.weights(o, i) * x.at(i);
    y.at(o) = acc;
  }
  ensure_finite(y, "dense_forward");
  return y;
}

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Rng& rng) : in_(in), out_(out) {
  if (in == 0 || out == 0) {
    throw ValidationError("dense: layer sizes must be positive");
  }
  p_.weights = Tensor({out, in});
  p_.bias = Tensor({out});
  init_glorot(p_.weights, in, out, rng);
  g_.weights = Tensor({out, in});
  g_.bias = Tensor({out});
}

Tensor DenseLayer::forward(const Tensor& x) {
  Tensor y = dense_forward(x, p_);
  cached_x_ = x;
  has_cache_ = true;
  return y;
}

Tensor DenseLayer::backward(const Tensor& upstream) {
  if (!has_cache_) throw ProtocolError("dense backward before forward");
  if (upstream.rank() != 1 || upstream.dim(0) != out_) {
    throw DimensionError("dense backward: upstream " + upstream.shape_str() +
                         " does not match output size " + std::to_string(out_));
  }
  Tensor dx({in_});
  for (std::size_t o = 0; o < out_; ++o) {
    double u = upstream.at(o);
    g_.bias.at(o) += u;
    for (std::size_t i = 0; i < in_; ++i) {
      g_.weights(o, i) += u * cached_x_.at(i);
      dx.at(i) += u * p_.weights(o, i);
    }
  }
  return dx;
}

void DenseLayer::zero_grads() {
  for (double& v : g_.weights.data()) v = 0.0;
  for (double& v : g_.bias.data()) v = 0.0;
}

// ---------------------------------------------------------------------------
// rescale
// ---------------------------------------------------------------------------

double rescale(double y_norm, const FeatureStats& stats) {
  if (!(stats.max > stats.min)) {
    throw ValidationError("rescale: degenerate stats for '" + stats.name +
                          "' (max must exceed min)");
  }
  double y = y_norm * (stats.max - stats.min) + stats.min;
  ensure_finite(y, "rescale");
  return y;
}

}  // namespace aero
