#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "aeroforecast/normalization.hpp"
#include "aeroforecast/rng.hpp"
#include "aeroforecast/tensor.hpp"

namespace aero {

// Glorot/Xavier uniform bound sqrt(6 / (fan_in + fan_out)).
double glorot_bound(std::size_t fan_in, std::size_t fan_out);
void init_glorot(Tensor& w, std::size_t fan_in, std::size_t fan_out, Rng& rng);

// ---------------------------------------------------------------------------
// Parameter bundles. Gradient bundles reuse the same structs (identical
// shapes); the gradient w.r.t. the layer input is returned by backward().
// ---------------------------------------------------------------------------

struct Conv1dParams {
  Tensor weights;  // [out_channels, in_channels, kernel]
  Tensor bias;     // [out_channels]
};

// Gate order used everywhere: forget, input, candidate, output.
enum Gate : std::size_t { kForget = 0, kInput = 1, kCandidate = 2, kOutput = 3 };

struct LstmParams {
  std::array<Tensor, 4> w;  // input weights, each [hidden, features]
  std::array<Tensor, 4> u;  // recurrent weights, each [hidden, hidden]
  std::array<Tensor, 4> b;  // biases, each [hidden]

  std::size_t hidden() const { return b[kForget].dim(0); }
  std::size_t features() const { return w[kForget].dim(1); }
};

struct DenseParams {
  Tensor weights;  // [out, in]
  Tensor bias;     // [out]
};

// ---------------------------------------------------------------------------
// Pure forward ops.
// ---------------------------------------------------------------------------

// Valid 1-D convolution, stride 1: out[t, o] = b[o] + sum_{c,j} x[t+j, c] * w[o, c, j].
// x is [T, C_in], the result is [T - k + 1, C_out]. Throws if T < k.
Tensor conv1d_forward(const Tensor& x, const Conv1dParams& p);

struct PoolResult {
  Tensor values;                    // [floor(T / stride), C]
  std::vector<std::size_t> argmax;  // input row of each max, flattened [out_t, c]
};

// Per-window per-channel maximum over x [T, C]; ties break toward the lower
// index and a trailing partial window is dropped.
PoolResult maxpool1d_forward(const Tensor& x, std::size_t width, std::size_t stride);

struct LstmState {
  Tensor h;
  Tensor c;
};

// One LSTM step: f = sig(W_f x + U_f h + b_f), i = sig(...), g = tanh(...),
// o = sig(...); c' = f.c + i.g; h' = o.tanh(c').
LstmState lstm_step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                    const LstmParams& p);

// Iterated lstm_step over seq [L, F] with zero initial state. Returns all
// hidden states [L, H] or only the last [H].
Tensor lstm_forward(const Tensor& seq, const LstmParams& p, bool return_full_sequence);

// W x + b; no activation.
Tensor dense_forward(const Tensor& x, const DenseParams& p);

// Affine map from the normalized scale back to physical units:
// y * (max - min) + min. Defined for inputs outside [0, 1] as well.
double rescale(double y_norm, const FeatureStats& stats);

// ---------------------------------------------------------------------------
// Trainable layers. forward() caches what backward() needs; backward()
// accumulates parameter gradients (so batches can sum) and returns the
// gradient w.r.t. the layer input. backward() before forward() throws
// ProtocolError.
// ---------------------------------------------------------------------------

class Conv1dLayer {
 public:
  Conv1dLayer(std::size_t in_channels, std::size_t out_channels,
              std::size_t kernel, Rng& rng);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& upstream);
  void zero_grads();

  Conv1dParams& params() { return p_; }
  const Conv1dParams& params() const { return p_; }
  Conv1dParams& grads() { return g_; }
  std::size_t kernel() const { return kernel_; }

 private:
  std::size_t in_channels_, out_channels_, kernel_;
  Conv1dParams p_, g_;
  Tensor cached_x_;
  bool has_cache_ = false;
};

class ReluLayer {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& upstream);
  const Tensor& cached_input() const;

 private:
  Tensor cached_x_;
  bool has_cache_ = false;
};

class MaxPool1dLayer {
 public:
  explicit MaxPool1dLayer(std::size_t width) : width_(width) {}

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& upstream);
  const Tensor& cached_input() const;
  const std::vector<std::size_t>& cached_argmax() const { return argmax_; }
  std::size_t width() const { return width_; }

 private:
  std::size_t width_;
  Tensor cached_x_;
  std::vector<std::size_t> argmax_;
  bool has_cache_ = false;
};

class LstmLayer {
 public:
  LstmLayer(std::size_t in_features, std::size_t hidden, bool return_full_sequence,
            Rng& rng);

  Tensor forward(const Tensor& seq);
  // upstream is [L, H] in full-sequence mode, [H] in last-state mode.
  Tensor backward(const Tensor& upstream);
  void zero_grads();

  LstmParams& params() { return p_; }
  const LstmParams& params() const { return p_; }
  LstmParams& grads() { return g_; }
  bool returns_full_sequence() const { return return_full_sequence_; }
  std::size_t hidden() const { return hidden_; }

 private:
  std::size_t in_features_, hidden_;
  bool return_full_sequence_;
  LstmParams p_, g_;

  // per-step caches for BPTT
  struct StepCache {
    std::vector<double> x;                     // input row
    std::array<std::vector<double>, 4> gates;  // f, i, g, o (post-activation)
    std::vector<double> c;                     // cell state after the step
    std::vector<double> tanh_c;
    std::vector<double> h;
  };
  std::vector<StepCache> steps_;
  bool has_cache_ = false;
};

class DenseLayer {
 public:
  DenseLayer(std::size_t in, std::size_t out, Rng& rng);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& upstream);
  void zero_grads();

  DenseParams& params() { return p_; }
  const DenseParams& params() const { return p_; }
  DenseParams& grads() { return g_; }

 private:
  std::size_t in_, out_;
  DenseParams p_, g_;
  Tensor cached_x_;
  bool has_cache_ = false;
};

}  // namespace aero
