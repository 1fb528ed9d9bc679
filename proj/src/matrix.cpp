// SPDX-License-Identifier: Apache-2.0
#include "pilir/matrix.hpp"

#include <cmath>

namespace pilir {

void matmul(const Matrix& w, const Matrix& x, Matrix& y) {
  const int out = w.rows(), in = w.cols(), b = x.cols();
  if (x.rows() != in) throw std::invalid_argument("matmul: inner dimension mismatch");
  if (y.rows() != out || y.cols() != b) y = Matrix(out, b);
  for (int o = 0; o < out; ++o) {
    double* yr = y.row(o);
    for (int j = 0; j < b; ++j) yr[j] = 0.0;
    const double* wr = w.row(o);
    for (int i = 0; i < in; ++i) {
      const double wv = wr[i];
      const double* xr = x.row(i);
      for (int j = 0; j < b; ++j) yr[j] += wv * xr[j];
    }
  }
}

void matmul_bias(const Matrix& w, const Matrix& x, const Matrix& b, Matrix& y) {
  const int out = w.rows(), in = w.cols(), n = x.cols();
  if (x.rows() != in) throw std::invalid_argument("matmul_bias: inner dimension mismatch");
  if (b.rows() != out || b.cols() != 1) throw std::invalid_argument("matmul_bias: bias shape");
  if (y.rows() != out || y.cols() != n) y = Matrix(out, n);
  for (int o = 0; o < out; ++o) {
    double* yr = y.row(o);
    const double bv = b(o, 0);
    for (int j = 0; j < n; ++j) yr[j] = bv;
    const double* wr = w.row(o);
    for (int i = 0; i < in; ++i) {
      const double wv = wr[i];
      const double* xr = x.row(i);
      for (int j = 0; j < n; ++j) yr[j] += wv * xr[j];
    }
  }
}

void acc_grad_weight(const Matrix& g, const Matrix& x, Matrix& dw) {
  const int out = g.rows(), b = g.cols(), in = x.rows();
  if (x.cols() != b) throw std::invalid_argument("acc_grad_weight: batch mismatch");
  if (dw.rows() != out || dw.cols() != in) throw std::invalid_argument("acc_grad_weight: shape");
  for (int o = 0; o < out; ++o) {
    const double* gr = g.row(o);
    double* dr = dw.row(o);
    for (int i = 0; i < in; ++i) {
      const double* xr = x.row(i);
      double s = 0.0;
      for (int j = 0; j < b; ++j) s += gr[j] * xr[j];
      dr[i] += s;
    }
  }
}

void acc_grad_input(const Matrix& w, const Matrix& g, Matrix& dx) {
  const int out = w.rows(), in = w.cols(), b = g.cols();
  if (g.rows() != out) throw std::invalid_argument("acc_grad_input: shape");
  if (dx.rows() != in || dx.cols() != b) throw std::invalid_argument("acc_grad_input: shape");
  for (int i = 0; i < in; ++i) {
    double* dr = dx.row(i);
    for (int o = 0; o < out; ++o) {
      const double wv = w(o, i);
      const double* gr = g.row(o);
      for (int j = 0; j < b; ++j) dr[j] += wv * gr[j];
    }
  }
}

void acc_grad_bias(const Matrix& g, Matrix& db) {
  if (db.rows() != g.rows() || db.cols() != 1) throw std::invalid_argument("acc_grad_bias: shape");
  for (int o = 0; o < g.rows(); ++o) {
    const double* gr = g.row(o);
    double s = 0.0;
    for (int j = 0; j < g.cols(); ++j) s += gr[j];
    db(o, 0) += s;
  }
}

bool all_finite(const Matrix& m) {
  for (double v : m.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace pilir
