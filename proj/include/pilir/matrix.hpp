// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pilir {

// Dense row-major matrix of doubles. Throughout the library rows are
// feature channels and columns are batch samples.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative shape");
  }
  Matrix(int rows, int cols, double fill)
      : rows_(rows), cols_(cols), data_(size_t(rows) * cols, fill) {}

  static Matrix scalar(double v) {
    Matrix m(1, 1);
    m.data_[0] = v;
    return m;
  }
  static Matrix from(int rows, int cols, std::vector<double> values) {
    if (values.size() != size_t(rows) * cols) throw std::invalid_argument("Matrix: size mismatch");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(values);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

  double& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }
  double* row(int r) { return data_.data() + size_t(r) * cols_; }
  const double* row(int r) const { return data_.data() + size_t(r) * cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Y = W * X, with W (out,in) and X (in,B). Loops are ordered so the inner
// loop runs over contiguous columns; summation order is fixed.
void matmul(const Matrix& w, const Matrix& x, Matrix& y);

// Y = W * X + b, b is (out,1) broadcast over columns.
void matmul_bias(const Matrix& w, const Matrix& x, const Matrix& b, Matrix& y);

// dW += G * X^T
void acc_grad_weight(const Matrix& g, const Matrix& x, Matrix& dw);

// dX += W^T * G
void acc_grad_input(const Matrix& w, const Matrix& g, Matrix& dx);

// db += row sums of G
void acc_grad_bias(const Matrix& g, Matrix& db);

bool all_finite(const Matrix& m);

}  // namespace pilir
