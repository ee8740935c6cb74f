#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "erd/errors.hpp"

namespace erd {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. All weight matrices and gradient
/// buffers in the library are instances of this type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  const double& operator()(std::size_t r, std::size_t c) const {
    return v_[r * cols_ + c];
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

// -- small dense kernels -----------------------------------------------------
// Row-major layout keeps every loop below sequential in memory.

/// y = W x
inline void matvec(const Matrix& w, const Vec& x, Vec& y) {
  if (w.cols() != x.size())
    throw ShapeError("matvec: " + std::to_string(w.rows()) + "x" +
                     std::to_string(w.cols()) + " vs input length " +
                     std::to_string(x.size()));
  y.assign(w.rows(), 0.0);
  const double* wp = w.data();
  const double* xp = x.data();
  const std::size_t n = w.cols();
  for (std::size_t i = 0; i < w.rows(); ++i, wp += n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wp[j] * xp[j];
    y[i] = acc;
  }
}

/// y += W x
inline void matvec_add(const Matrix& w, const Vec& x, Vec& y) {
  if (w.cols() != x.size() || w.rows() != y.size())
    throw ShapeError("matvec_add: shape mismatch");
  const double* wp = w.data();
  const double* xp = x.data();
  const std::size_t n = w.cols();
  for (std::size_t i = 0; i < w.rows(); ++i, wp += n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wp[j] * xp[j];
    y[i] += acc;
  }
}

/// dx += W^T dy, computed row-wise so memory access stays sequential.
inline void matvec_transpose_add(const Matrix& w, const Vec& dy, Vec& dx) {
  if (w.rows() != dy.size() || w.cols() != dx.size())
    throw ShapeError("matvec_transpose_add: shape mismatch");
  const double* wp = w.data();
  const std::size_t n = w.cols();
  double* dxp = dx.data();
  for (std::size_t i = 0; i < w.rows(); ++i, wp += n) {
    const double g = dy[i];
    if (g == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) dxp[j] += g * wp[j];
  }
}

/// acc += a b^T
inline void add_outer(Matrix& acc, const Vec& a, const Vec& b) {
  if (acc.rows() != a.size() || acc.cols() != b.size())
    throw ShapeError("add_outer: shape mismatch");
  double* accp = acc.data();
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < a.size(); ++i, accp += n) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) accp[j] += ai * b[j];
  }
}

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// y += alpha x
inline void axpy(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw ShapeError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double norm2(const Vec& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

inline bool all_finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

/// A learnable tensor: the value, its gradient accumulator and the momentum
/// buffer share one shape. Gradients are zeroed by the optimizer step.
struct Parameter {
  Matrix value, grad, velocity;

  Parameter() = default;
  Parameter(std::size_t rows, std::size_t cols)
      : value(rows, cols), grad(rows, cols), velocity(rows, cols) {}

  std::size_t rows() const { return value.rows(); }
  std::size_t cols() const { return value.cols(); }
  std::size_t size() const { return value.size(); }

  void zero_grad() { grad.fill(0.0); }
};

/// Name + pointer pair used by the optimizer, the checkpoint writer and the
/// gradient checker.
struct NamedParam {
  std::string name;
  Parameter* param = nullptr;
};

}  // namespace erd
