#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aeroforecast/layers.hpp"
#include "aeroforecast/rng.hpp"
#include "support/oracles.hpp"

using namespace aero;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.5,
                     double hi = 1.5) {
  Tensor t(std::move(shape));
  for (double& x : t.data()) x = rng.uniform(lo, hi);
  return t;
}

LstmParams zero_lstm_params(std::size_t hidden, std::size_t features) {
  LstmParams p;
  for (std::size_t g = 0; g < 4; ++g) {
    p.w[g] = Tensor({hidden, features});
    p.u[g] = Tensor({hidden, hidden});
    p.b[g] = Tensor({hidden});
  }
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// conv1d
// ---------------------------------------------------------------------------

TEST_CASE("conv1d with an identity kernel reproduces the input") {
  Conv1dParams p{Tensor({1, 1, 1}, {1.0}), Tensor({1})};
  Tensor x({4, 1}, {1, 2, 3, 4});
  Tensor y = conv1d_forward(x, p);
  REQUIRE(y.shape() == std::vector<std::size_t>{4, 1});
  for (std::size_t i = 0; i < 4; ++i) CHECK(y.at(i) == x.at(i));
}

TEST_CASE("conv1d sliding dot product, hand-evaluated") {
  // kernel [1, 0, -1] over [1,2,3,4]: 1-3 = -2, 2-4 = -2
  Conv1dParams p{Tensor({1, 1, 3}, {1.0, 0.0, -1.0}), Tensor({1})};
  Tensor x({4, 1}, {1, 2, 3, 4});
  Tensor y = conv1d_forward(x, p);
  REQUIRE(y.shape() == std::vector<std::size_t>{2, 1});
  CHECK(y.at(0) == -2.0);
  CHECK(y.at(1) == -2.0);
}

TEST_CASE("conv1d with zero weights broadcasts the bias") {
  Conv1dParams p{Tensor({2, 3, 2}), Tensor({2}, {4.25, -1.5})};
  Rng rng(1);
  Tensor x = random_tensor({5, 3}, rng);
  Tensor y = conv1d_forward(x, p);
  for (std::size_t t = 0; t < y.dim(0); ++t) {
    CHECK(y(t, 0) == 4.25);
    CHECK(y(t, 1) == -1.5);
  }
}

TEST_CASE("conv1d rejects sequences shorter than the kernel") {
  Conv1dParams p{Tensor({1, 1, 3}, {1, 1, 1}), Tensor({1})};
  Tensor x({2, 1}, {1, 2});
  CHECK_THROWS_WITH_AS(conv1d_forward(x, p), doctest::Contains("shorter"),
                       DimensionError);
}

TEST_CASE("conv1d output length is exactly T - k + 1") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t k = 1 + rng.integer(4);
    std::size_t t_len = k + rng.integer(8);
    std::size_t c = 1 + rng.integer(3);
    std::size_t o = 1 + rng.integer(3);
    Conv1dLayer layer(c, o, k, rng);
    Tensor y = layer.forward(random_tensor({t_len, c}, rng));
    CHECK(y.dim(0) == t_len - k + 1);
    CHECK(y.dim(1) == o);
  }
}

// ---------------------------------------------------------------------------
// maxpool1d
// ---------------------------------------------------------------------------

TEST_CASE("maxpool picks the per-window maximum") {
  Tensor x({4, 1}, {1, 3, 2, 5});
  PoolResult r = maxpool1d_forward(x, 2, 2);
  REQUIRE(r.values.shape() == std::vector<std::size_t>{2, 1});
  CHECK(r.values.at(0) == 3.0);
  CHECK(r.values.at(1) == 5.0);
  CHECK(r.argmax[0] == 1);
  CHECK(r.argmax[1] == 3);
}

TEST_CASE("maxpool of a constant input is constant; ties go low") {
  Tensor x({4, 1}, {7, 7, 7, 7});
  PoolResult r = maxpool1d_forward(x, 2, 2);
  CHECK(r.values.at(0) == 7.0);
  CHECK(r.values.at(1) == 7.0);
  CHECK(r.argmax[0] == 0);  // tie broken toward the lower index
  CHECK(r.argmax[1] == 2);
}

TEST_CASE("maxpool drops a trailing odd element and rejects short input") {
  Tensor x({5, 1}, {1, 2, 3, 4, 99});
  PoolResult r = maxpool1d_forward(x, 2, 2);
  CHECK(r.values.dim(0) == 2);  // the 99 never appears
  CHECK(r.values.at(1) == 4.0);
  CHECK_THROWS_AS(maxpool1d_forward(Tensor({1, 1}, {1.0}), 2, 2), DimensionError);
}

TEST_CASE("maxpool backward routes upstream gradient to the argmax slots") {
  MaxPool1dLayer layer(2);
  Tensor x({4, 1}, {1, 3, 2, 5});
  layer.forward(x);
  Tensor up({2, 1}, {1, 1});
  Tensor dx = layer.backward(up);
  CHECK(dx.at(0) == 0.0);
  CHECK(dx.at(1) == 1.0);
  CHECK(dx.at(2) == 0.0);
  CHECK(dx.at(3) == 1.0);
}

TEST_CASE("maxpool backward conserves gradient mass, argmax slots only") {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t t_len = 2 + rng.integer(9);
    std::size_t c = 1 + rng.integer(4);
    MaxPool1dLayer layer(2);
    Tensor x = random_tensor({t_len, c}, rng, -5, 5);
    Tensor y = layer.forward(x);
    Tensor up = random_tensor(y.shape(), rng);
    Tensor dx = layer.backward(up);

    double up_sum = 0, dx_sum = 0;
    for (double v : up.data()) up_sum += v;
    for (double v : dx.data()) dx_sum += v;
    CHECK(dx_sum == doctest::Approx(up_sum).epsilon(1e-12));

    std::size_t nonzero = 0;
    for (double v : dx.data()) nonzero += v != 0.0;
    CHECK(nonzero <= layer.cached_argmax().size());
  }
}

// ---------------------------------------------------------------------------
// lstm
// ---------------------------------------------------------------------------

TEST_CASE("lstm_step zero fixed point") {
  LstmParams p = zero_lstm_params(3, 2);
  LstmState s = lstm_step(Tensor({2}), Tensor({3}), Tensor({3}), p);
  for (double v : s.h.data()) CHECK(v == 0.0);
  for (double v : s.c.data()) CHECK(v == 0.0);
}

TEST_CASE("lstm_step scalar gate arithmetic with zero parameters") {
  // all gates sit at sigmoid(0) = 0.5, candidate at tanh(0) = 0:
  // c' = 0.5 * 1 = 0.5, h' = 0.5 * tanh(0.5)
  LstmParams p = zero_lstm_params(1, 1);
  LstmState s = lstm_step(Tensor({1}), Tensor({1}), Tensor({1}, {1.0}), p);
  CHECK(s.c.at(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.h.at(0) == doctest::Approx(0.23105857863000487).epsilon(1e-12));
}

TEST_CASE("lstm_step saturated forget gate preserves the cell state") {
  LstmParams p = zero_lstm_params(1, 1);
  p.b[kForget].at(0) = 50.0;  // sigmoid(50) ~ 1
  LstmState s = lstm_step(Tensor({1}), Tensor({1}), Tensor({1}, {1.0}), p);
  CHECK(std::abs(s.c.at(0) - 1.0) < 1e-12);
}

TEST_CASE("lstm_forward length-1 equals a single step") {
  Rng rng(21);
  LstmLayer layer(3, 4, false, rng);
  Tensor seq = random_tensor({1, 3}, rng);
  Tensor last = lstm_forward(seq, layer.params(), false);

  Tensor x({3});
  for (std::size_t f = 0; f < 3; ++f) x.at(f) = seq(0, f);
  LstmState s = lstm_step(x, Tensor({4}), Tensor({4}), layer.params());
  for (std::size_t h = 0; h < 4; ++h) {
    CHECK(last.at(h) == doctest::Approx(s.h.at(h)).epsilon(1e-15));
  }
}

TEST_CASE("lstm_forward with zero parameters outputs zeros") {
  LstmParams p = zero_lstm_params(3, 2);
  Rng rng(4);
  Tensor out = lstm_forward(random_tensor({5, 2}, rng), p, true);
  for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("lstm full-sequence row L-1 equals the last-state output") {
  Rng rng(33);
  LstmLayer full(3, 5, true, rng);
  Tensor seq = random_tensor({6, 3}, rng);
  Tensor all = full.forward(seq);
  Tensor last = lstm_forward(seq, full.params(), false);
  for (std::size_t h = 0; h < 5; ++h) {
    CHECK(all(5, h) == doctest::Approx(last.at(h)).epsilon(1e-15));
  }
}

TEST_CASE("the pure op and the layer agree bitwise for both lstm modes") {
  Rng rng(47);
  for (bool full : {true, false}) {
    LstmLayer layer(4, 3, full, rng);
    Tensor seq = random_tensor({5, 4}, rng);
    Tensor via_layer = layer.forward(seq);
    Tensor via_op = lstm_forward(seq, layer.params(), full);
    REQUIRE(via_layer.shape() == via_op.shape());
    for (std::size_t i = 0; i < via_layer.size(); ++i) {
      CHECK(via_layer.at(i) == via_op.at(i));
    }
  }
}

TEST_CASE("lstm rejects an empty sequence") {
  Rng rng(1);
  LstmLayer layer(3, 4, false, rng);
  CHECK_THROWS_AS(layer.forward(Tensor{}), DimensionError);
  CHECK_THROWS_AS(lstm_forward(Tensor{}, layer.params(), false), DimensionError);
}

TEST_CASE("lstm cell state growth is bounded: |c_t| <= |c_prev| + 1") {
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t h = 1 + rng.integer(4), f = 1 + rng.integer(4);
    LstmLayer layer(f, h, false, rng);
    Tensor x = random_tensor({f}, rng, -3, 3);
    Tensor h_prev = random_tensor({h}, rng, -2, 2);
    Tensor c_prev = random_tensor({h}, rng, -4, 4);
    LstmState s = lstm_step(x, h_prev, c_prev, layer.params());
    for (std::size_t i = 0; i < h; ++i) {
      CHECK(std::abs(s.c.at(i)) <= std::abs(c_prev.at(i)) + 1.0 + 1e-12);
    }
  }
}

// ---------------------------------------------------------------------------
// dense and rescale
// ---------------------------------------------------------------------------

TEST_CASE("dense identity and hand arithmetic") {
  DenseParams eye{Tensor({2, 2}, {1, 0, 0, 1}), Tensor({2})};
  Tensor x = Tensor::row({3.5, -2});
  Tensor y = dense_forward(x, eye);
  CHECK(y.at(0) == 3.5);
  CHECK(y.at(1) == -2.0);

  DenseParams p{Tensor({2, 2}, {1, 2, 3, 4}), Tensor({2}, {1, 1})};
  Tensor z = dense_forward(Tensor::row({5, 6}), p);
  CHECK(z.at(0) == 18.0);  // 1*5 + 2*6 + 1
  CHECK(z.at(1) == 40.0);  // 3*5 + 4*6 + 1

  DenseParams zero{Tensor({2, 2}), Tensor({2}, {0.5, -0.5})};
  Tensor b = dense_forward(Tensor::row({9, 9}), zero);
  CHECK(b.at(0) == 0.5);
  CHECK(b.at(1) == -0.5);

  CHECK_THROWS_AS(dense_forward(Tensor::row({1, 2, 3}), p), DimensionError);
}

TEST_CASE("rescale is the affine map back to physical units") {
  FeatureStats s{"pm25_mean", 0.0, 500.0};
  CHECK(rescale(0.0, s) == 0.0);
  CHECK(rescale(1.0, s) == 500.0);
  CHECK(rescale(0.5, s) == 250.0);
  CHECK(rescale(1.2, s) == doctest::Approx(600.0));  // defined outside [0,1]

  FeatureStats degenerate{"x", 3.0, 3.0};
  CHECK_THROWS_AS(rescale(0.5, degenerate), ValidationError);
}

// ---------------------------------------------------------------------------
// backward passes against central finite differences
// ---------------------------------------------------------------------------

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kFdTol = 1e-4;

// Runs layer.forward, reduces the output against fixed weights, and checks
// the analytic gradients of every parameter tensor and of the input.
template <class Layer>
void check_layer_gradients(Layer& layer, std::vector<Tensor*> params,
                           std::vector<Tensor*> grads, Tensor& x, Rng& rng) {
  Tensor out = layer.forward(x);
  Tensor w = random_tensor(out.shape(), rng);

  auto loss = [&]() { return oracle::weighted_sum(layer.forward(x), w); };

  layer.zero_grads();
  layer.forward(x);
  Tensor dx = layer.backward(w);

  for (std::size_t p = 0; p < params.size(); ++p) {
    double worst = oracle::fd_check(loss, *params[p], *grads[p], kFdStep);
    CHECK(worst < kFdTol);
  }
  double worst_input = oracle::fd_check(loss, x, dx, kFdStep);
  CHECK(worst_input < kFdTol);
}

}  // namespace

TEST_CASE("conv1d gradients match finite differences over 20 seeds") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::size_t c = 1 + rng.integer(3), o = 1 + rng.integer(3), k = 1 + rng.integer(3);
    std::size_t t_len = k + 1 + rng.integer(4);
    Conv1dLayer layer(c, o, k, rng);
    Tensor x = random_tensor({t_len, c}, rng);
    check_layer_gradients(layer, {&layer.params().weights, &layer.params().bias},
                          {&layer.grads().weights, &layer.grads().bias}, x, rng);
  }
}

TEST_CASE("dense gradients match finite differences over 20 seeds") {
  for (std::uint64_t seed = 101; seed <= 120; ++seed) {
    Rng rng(seed);
    std::size_t in = 1 + rng.integer(5), out = 1 + rng.integer(5);
    DenseLayer layer(in, out, rng);
    Tensor x = random_tensor({in}, rng);
    check_layer_gradients(layer, {&layer.params().weights, &layer.params().bias},
                          {&layer.grads().weights, &layer.grads().bias}, x, rng);
  }
}

TEST_CASE("lstm gradients match finite differences over 20 seeds, both modes") {
  for (std::uint64_t seed = 201; seed <= 220; ++seed) {
    Rng rng(seed);
    std::size_t f = 1 + rng.integer(4), h = 1 + rng.integer(4);
    std::size_t len = 2 + rng.integer(4);
    bool full = seed % 2 == 0;
    LstmLayer layer(f, h, full, rng);
    Tensor x = random_tensor({len, f}, rng);

    std::vector<Tensor*> params, grads;
    for (std::size_t g = 0; g < 4; ++g) {
      params.push_back(&layer.params().w[g]);
      params.push_back(&layer.params().u[g]);
      params.push_back(&layer.params().b[g]);
      grads.push_back(&layer.grads().w[g]);
      grads.push_back(&layer.grads().u[g]);
      grads.push_back(&layer.grads().b[g]);
    }
    check_layer_gradients(layer, params, grads, x, rng);
  }
}

TEST_CASE("relu backward matches finite differences away from the kink") {
  for (std::uint64_t seed = 301; seed <= 320; ++seed) {
    Rng rng(seed);
    std::size_t n = 3 + rng.integer(4);
    ReluLayer layer;
    Tensor x({n});
    for (double& v : x.data()) {
      v = rng.uniform(-2, 2);
      if (std::abs(v) < 0.05) v += 0.1;  // keep FD differentiable
    }
    Tensor w = random_tensor({n}, rng);
    auto loss = [&]() { return oracle::weighted_sum(layer.forward(x), w); };
    layer.forward(x);
    Tensor dx = layer.backward(w);
    CHECK(oracle::fd_check(loss, x, dx, kFdStep) < kFdTol);
  }
}

TEST_CASE("zero upstream gradient yields zero gradients everywhere") {
  Rng rng(55);
  Conv1dLayer layer(2, 3, 2, rng);
  Tensor x = random_tensor({5, 2}, rng);
  layer.forward(x);
  layer.zero_grads();
  Tensor dx = layer.backward(Tensor({4, 3}));
  for (double v : dx.data()) CHECK(v == 0.0);
  for (double v : layer.grads().weights.data()) CHECK(v == 0.0);
  for (double v : layer.grads().bias.data()) CHECK(v == 0.0);
}

TEST_CASE("dense identity Jacobian passes upstream through unchanged") {
  Rng rng(56);
  DenseLayer layer(3, 3, rng);
  layer.params().weights = Tensor({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  layer.params().bias = Tensor({3});
  Tensor x = random_tensor({3}, rng);
  layer.forward(x);
  Tensor up = random_tensor({3}, rng);
  Tensor dx = layer.backward(up);
  for (std::size_t i = 0; i < 3; ++i) CHECK(dx.at(i) == up.at(i));
}

TEST_CASE("backward before forward is a protocol error") {
  Rng rng(6);
  Conv1dLayer conv(1, 1, 1, rng);
  CHECK_THROWS_AS(conv.backward(Tensor({1, 1}, {1.0})), ProtocolError);
  DenseLayer dense(2, 2, rng);
  CHECK_THROWS_AS(dense.backward(Tensor({2})), ProtocolError);
  LstmLayer lstm(2, 2, false, rng);
  CHECK_THROWS_AS(lstm.backward(Tensor({2})), ProtocolError);
  MaxPool1dLayer pool(2);
  CHECK_THROWS_AS(pool.backward(Tensor({1, 1}, {1.0})), ProtocolError);
  ReluLayer relu_layer;
  CHECK_THROWS_AS(relu_layer.backward(Tensor({1}, {1.0})), ProtocolError);
}
