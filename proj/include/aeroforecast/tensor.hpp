#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "aeroforecast/errors.hpp"

namespace aero {

// Dense n-dimensional array of doubles, flat row-major storage with an
// explicit shape. The only numeric carrier in the library. Kernels are pure
// functions; a constructed tensor is treated as an immutable value except by
// the optimizer, which owns the tensors it updates.
class Tensor {
 public:
  Tensor() = default;  // empty placeholder, size 0

  // Zero-filled tensor of the given shape. Dimensions must be positive.
  explicit Tensor(std::vector<std::size_t> shape);

  // Takes ownership of `data`; length must equal the shape product and every
  // element must be finite.
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

  // 1-D convenience for tests and small literals.
  static Tensor row(std::initializer_list<double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t flat) { return data_[flat]; }
  double at(std::size_t flat) const { return data_[flat]; }

  // 2-D and 3-D indexing, row-major.
  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // "[2,3]" style, used in error messages.
  std::string shape_str() const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Throws NumericError naming `op` if any element of `t` is NaN or Inf.
void ensure_finite(const Tensor& t, const char* op);
void ensure_finite(double x, const char* op);

// --- scalar activations and their analytic derivatives ---

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double sigmoid_deriv(double x) {
  double s = sigmoid(x);
  return s * (1.0 - s);
}
inline double tanh_deriv(double x) {
  double t = std::tanh(x);
  return 1.0 - t * t;
}
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double relu_deriv(double x) { return x > 0.0 ? 1.0 : 0.0; }

// --- kernels ---

// Standard row-major matrix product; both arguments must be rank 2 with
// matching inner dimensions.
Tensor matmul(const Tensor& a, const Tensor& b);

// Binary pointwise ops; shapes must be identical.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// Pointwise scalar multiply.
Tensor scale(const Tensor& a, double s);

// Pointwise activations.
Tensor sigmoid(const Tensor& t);
Tensor tanh(const Tensor& t);
Tensor relu(const Tensor& t);

// Reductions along one axis. The reduced axis is removed from the shape; a
// full reduction of a rank-1 tensor yields shape [1].
Tensor sum(const Tensor& t, std::size_t axis);
Tensor mean(const Tensor& t, std::size_t axis);

struct MaxReduce {
  Tensor values;
  // Position along the reduced axis of each maximum, one entry per output
  // element in row-major order; ties break toward the lower index.
  std::vector<std::size_t> argmax;
};
MaxReduce max_with_index(const Tensor& t, std::size_t axis);

}  // namespace aero
