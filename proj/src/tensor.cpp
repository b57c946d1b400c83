#include "aeroforecast/tensor.hpp"

#include <cmath>
#include <sstream>

namespace aero {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void validate_shape(const std::vector<std::size_t>& shape) {
  if (shape.empty()) {
    throw DimensionError("tensor shape must have at least one dimension");
  }
  for (std::size_t d : shape) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
  }
}

template <class F>
Tensor pointwise(const Tensor& t, F f, const char* op) {
  Tensor r(t.shape());
  auto in = t.data();
  auto out = r.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  ensure_finite(r, op);
  return r;
}

template <class F>
Tensor pointwise2(const Tensor& a, const Tensor& b, F f, const char* op) {
  require_same_shape(a, b, op);
  Tensor r(a.shape());
  auto da = a.data();
  auto db = b.data();
  auto out = r.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(da[i], db[i]);
  ensure_finite(r, op);
  return r;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (data_.size() != shape_product(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
  }
  ensure_finite(*this, "tensor construction");
}

Tensor Tensor::row(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << ',';
    os << shape_[i];
  }
  os << ']';
  return os.str();
}

void ensure_finite(const Tensor& t, const char* op) {
  for (double x : t.data()) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string(op) + " produced a non-finite value");
    }
  }
}

void ensure_finite(double x, const char* op) {
  if (!std::isfinite(x)) {
    throw NumericError(std::string(op) + " produced a non-finite value");
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: incompatible shapes " + a.shape_str() +
                         " vs " + b.shape_str());
  }
  std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double aip = a(i, p);
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += aip * b(p, j);
      }
    }
  }
  ensure_finite(out, "matmul");
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return pointwise2(a, b, [](double x, double y) { return x + y; }, "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return pointwise2(a, b, [](double x, double y) { return x - y; }, "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return pointwise2(a, b, [](double x, double y) { return x * y; }, "mul");
}

Tensor scale(const Tensor& a, double s) {
  return pointwise(a, [s](double x) { return x * s; }, "scale");
}

Tensor sigmoid(const Tensor& t) {
  return pointwise(t, [](double x) { return sigmoid(x); }, "sigmoid");
}

Tensor tanh(const Tensor& t) {
  return pointwise(t, [](double x) { return std::tanh(x); }, "tanh");
}

Tensor relu(const Tensor& t) {
  return pointwise(t, [](double x) { return relu(x); }, "relu");
}

namespace {

// Shared frame for axis reductions: out[outer][inner] over in[outer][axis][inner].
struct ReduceFrame {
  std::size_t outer = 1, axis_len = 0, inner = 1;
  std::vector<std::size_t> out_shape;
};

ReduceFrame reduce_frame(const Tensor& t, std::size_t axis, const char* op) {
  if (t.rank() == 0 || t.empty()) {
    throw DimensionError(std::string(op) + ": cannot reduce an empty tensor");
  }
  if (axis >= t.rank()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + t.shape_str());
  }
  ReduceFrame f;
  f.axis_len = t.dim(axis);
  for (std::size_t i = 0; i < axis; ++i) f.outer *= t.dim(i);
  for (std::size_t i = axis + 1; i < t.rank(); ++i) f.inner *= t.dim(i);
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (i != axis) f.out_shape.push_back(t.dim(i));
  }
  if (f.out_shape.empty()) f.out_shape.push_back(1);
  return f;
}

}  // namespace

Tensor sum(const Tensor& t, std::size_t axis) {
  ReduceFrame f = reduce_frame(t, axis, "sum");
  Tensor out(f.out_shape);
  auto in = t.data();
  for (std::size_t o = 0; o < f.outer; ++o) {
    for (std::size_t i = 0; i < f.inner; ++i) {
      double acc = 0.0;
      for (std::size_t a = 0; a < f.axis_len; ++a) {
        acc += in[(o * f.axis_len + a) * f.inner + i];
      }
      out.at(o * f.inner + i) = acc;
    }
  }
  ensure_finite(out, "sum");
  return out;
}

Tensor mean(const Tensor& t, std::size_t axis) {
  ReduceFrame f = reduce_frame(t, axis, "mean");
  Tensor out = sum(t, axis);
  for (double& x : out.data()) x /= static_cast<double>(f.axis_len);
  ensure_finite(out, "mean");
  return out;
}

MaxReduce max_with_index(const Tensor& t, std::size_t axis) {
  ReduceFrame f = reduce_frame(t, axis, "max_with_index");
  MaxReduce r{Tensor(f.out_shape), std::vector<std::size_t>(f.outer * f.inner, 0)};
  auto in = t.data();
  for (std::size_t o = 0; o < f.outer; ++o) {
    for (std::size_t i = 0; i < f.inner; ++i) {
      double best = in[(o * f.axis_len + 0) * f.inner + i];
      std::size_t best_a = 0;
      for (std::size_t a = 1; a < f.axis_len; ++a) {
        double v = in[(o * f.axis_len + a) * f.inner + i];
        if (v > best) {
          best = v;
          best_a = a;
        }
      }
      r.values.at(o * f.inner + i) = best;
      r.argmax[o * f.inner + i] = best_a;
    }
  }
  ensure_finite(r.values, "max_with_index");
  return r;
}

}  // namespace aero
