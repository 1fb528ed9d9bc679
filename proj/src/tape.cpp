// SPDX-License-Identifier: Apache-2.0
#include "pilir/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pilir {

namespace {

// Elementwise binary with numpy-style broadcasting: each dimension must
// match or be 1 on one side.
template <typename F>
void ew_binary(const Matrix& a, const Matrix& b, Matrix& out, F f) {
  const int r = out.rows(), c = out.cols();
  const int ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  for (int i = 0; i < r; ++i) {
    const double* ar = a.row(ra == 1 ? 0 : i);
    const double* br = b.row(rb == 1 ? 0 : i);
    double* yr = out.row(i);
    if (ca == c && cb == c) {
      for (int j = 0; j < c; ++j) yr[j] = f(ar[j], br[j]);
    } else if (ca == c) {
      const double bs = br[0];
      for (int j = 0; j < c; ++j) yr[j] = f(ar[j], bs);
    } else if (cb == c) {
      const double as = ar[0];
      for (int j = 0; j < c; ++j) yr[j] = f(as, br[j]);
    } else {
      for (int j = 0; j < c; ++j) yr[j] = f(ar[0], br[0]);
    }
  }
}

template <typename F>
void ew_unary(const Matrix& a, Matrix& out, F f) {
  const double* src = a.data();
  double* dst = out.data();
  const size_t n = a.size();
  for (size_t k = 0; k < n; ++k) dst[k] = f(src[k]);
}

// target[collapse(i,j)] += sgn * g(i,j), summing over broadcast dims.
void acc_bcast(const Matrix& g, Matrix& target, double sgn) {
  const int r = g.rows(), c = g.cols();
  const int tr = target.rows(), tc = target.cols();
  if (tr == r && tc == c) {
    double* t = target.data();
    const double* s = g.data();
    for (size_t k = 0; k < g.size(); ++k) t[k] += sgn * s[k];
    return;
  }
  for (int i = 0; i < r; ++i) {
    const double* gr = g.row(i);
    double* tp = target.row(tr == 1 ? 0 : i);
    if (tc == c) {
      for (int j = 0; j < c; ++j) tp[j] += sgn * gr[j];
    } else {
      double s = 0.0;
      for (int j = 0; j < c; ++j) s += gr[j];
      tp[0] += sgn * s;
    }
  }
}

// target[collapse_t(i,j)] += sgn * g(i,j) * other[collapse_o(i,j)]
void acc_mul_bcast(const Matrix& g, const Matrix& other, Matrix& target, double sgn) {
  const int r = g.rows(), c = g.cols();
  const int orr = other.rows(), oc = other.cols();
  const int tr = target.rows(), tc = target.cols();
  for (int i = 0; i < r; ++i) {
    const double* gr = g.row(i);
    const double* orow = other.row(orr == 1 ? 0 : i);
    double* tp = target.row(tr == 1 ? 0 : i);
    if (tc == c && oc == c) {
      for (int j = 0; j < c; ++j) tp[j] += sgn * gr[j] * orow[j];
    } else if (tc == c) {
      const double ov = orow[0];
      for (int j = 0; j < c; ++j) tp[j] += sgn * gr[j] * ov;
    } else if (oc == c) {
      double s = 0.0;
      for (int j = 0; j < c; ++j) s += gr[j] * orow[j];
      tp[0] += sgn * s;
    } else {
      double s = 0.0;
      for (int j = 0; j < c; ++j) s += gr[j];
      tp[0] += sgn * s * orow[0];
    }
  }
}

}  // namespace

void Tape::broadcast_shape(const Matrix& a, const Matrix& b, int& r, int& c) {
  auto bd = [](int x, int y, const char* what) {
    if (x == y) return x;
    if (x == 1) return y;
    if (y == 1) return x;
    throw std::invalid_argument(std::string("tape: incompatible ") + what + " (" +
                                std::to_string(x) + " vs " + std::to_string(y) + ")");
  };
  r = bd(a.rows(), b.rows(), "rows");
  c = bd(a.cols(), b.cols(), "cols");
}

NodeId Tape::push(Slot s) {
  slots_.push_back(std::move(s));
  return NodeId(slots_.size() - 1);
}

NodeId Tape::constant(Matrix v) {
  if (!all_finite(v)) throw std::invalid_argument("tape: non-finite constant");
  Slot s;
  s.op = Op::Const;
  s.value = std::move(v);
  return push(std::move(s));
}

NodeId Tape::param(ParamId id) {
  if (!params_ || id < 0 || id >= params_->count())
    throw std::invalid_argument("tape: unknown parameter");
  Slot s;
  s.op = Op::Param;
  s.pid = id;
  s.pvalue = &params_->value(id);
  s.reaches_param = true;
  return push(std::move(s));
}

NodeId Tape::binary(Op op, NodeId a, NodeId b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  int r, c;
  broadcast_shape(av, bv, r, c);
  Slot s;
  s.op = op;
  s.n_parents = 2;
  s.parent[0] = a;
  s.parent[1] = b;
  s.reaches_param = slots_[a].reaches_param || slots_[b].reaches_param;
  s.value = Matrix(r, c);
  switch (op) {
    case Op::Add: ew_binary(av, bv, s.value, [](double x, double y) { return x + y; }); break;
    case Op::Sub: ew_binary(av, bv, s.value, [](double x, double y) { return x - y; }); break;
    case Op::Mul: ew_binary(av, bv, s.value, [](double x, double y) { return x * y; }); break;
    case Op::Div:
      for (double d : bv.values())
        if (d == 0.0) throw std::domain_error("tape: division by zero");
      ew_binary(av, bv, s.value, [](double x, double y) { return x / y; });
      break;
    default: throw std::logic_error("tape: bad binary op");
  }
  return push(std::move(s));
}

NodeId Tape::unary(Op op, NodeId a) {
  const Matrix& av = value(a);
  Slot s;
  s.op = op;
  s.n_parents = 1;
  s.parent[0] = a;
  s.reaches_param = slots_[a].reaches_param;
  s.value = Matrix(av.rows(), av.cols());
  switch (op) {
    case Op::Neg: ew_unary(av, s.value, [](double x) { return -x; }); break;
    case Op::Square: ew_unary(av, s.value, [](double x) { return x * x; }); break;
    case Op::Sin: ew_unary(av, s.value, [](double x) { return std::sin(x); }); break;
    case Op::Cos: ew_unary(av, s.value, [](double x) { return std::cos(x); }); break;
    case Op::Exp: ew_unary(av, s.value, [](double x) { return std::exp(x); }); break;
    case Op::Tanh: ew_unary(av, s.value, [](double x) { return std::tanh(x); }); break;
    default: throw std::logic_error("tape: bad unary op");
  }
  return push(std::move(s));
}

NodeId Tape::add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
NodeId Tape::sub(NodeId a, NodeId b) { return binary(Op::Sub, a, b); }
NodeId Tape::mul(NodeId a, NodeId b) { return binary(Op::Mul, a, b); }
NodeId Tape::div(NodeId a, NodeId b) { return binary(Op::Div, a, b); }
NodeId Tape::neg(NodeId a) { return unary(Op::Neg, a); }
NodeId Tape::square(NodeId a) { return unary(Op::Square, a); }
NodeId Tape::sin(NodeId a) { return unary(Op::Sin, a); }
NodeId Tape::cos(NodeId a) { return unary(Op::Cos, a); }
NodeId Tape::exp(NodeId a) { return unary(Op::Exp, a); }
NodeId Tape::tanh(NodeId a) { return unary(Op::Tanh, a); }

NodeId Tape::pow_int(NodeId a, int n) {
  const Matrix& av = value(a);
  if (n < 0)
    for (double d : av.values())
      if (d == 0.0) throw std::domain_error("tape: zero base with negative exponent");
  Slot s;
  s.op = Op::PowInt;
  s.n_parents = 1;
  s.parent[0] = a;
  s.aux = n;
  s.reaches_param = slots_[a].reaches_param;
  s.value = Matrix(av.rows(), av.cols());
  ew_unary(av, s.value, [n](double x) { return std::pow(x, n); });
  return push(std::move(s));
}

NodeId Tape::affine(NodeId w, NodeId x, NodeId b) {
  const Matrix& wv = value(w);
  const Matrix& xv = value(x);
  const Matrix& bv = value(b);
  if (wv.cols() != xv.rows() || bv.rows() != wv.rows() || bv.cols() != 1)
    throw std::invalid_argument("tape: affine dimension mismatch");
  Slot s;
  s.op = Op::Affine;
  s.n_parents = 3;
  s.parent[0] = w;
  s.parent[1] = x;
  s.parent[2] = b;
  s.reaches_param =
      slots_[w].reaches_param || slots_[x].reaches_param || slots_[b].reaches_param;
  matmul_bias(wv, xv, bv, s.value);
  return push(std::move(s));
}

NodeId Tape::linmap(NodeId w, NodeId x) {
  const Matrix& wv = value(w);
  const Matrix& xv = value(x);
  if (wv.cols() != xv.rows()) throw std::invalid_argument("tape: linmap dimension mismatch");
  Slot s;
  s.op = Op::LinMap;
  s.n_parents = 2;
  s.parent[0] = w;
  s.parent[1] = x;
  s.reaches_param = slots_[w].reaches_param || slots_[x].reaches_param;
  matmul(wv, xv, s.value);
  return push(std::move(s));
}

NodeId Tape::gather(NodeId src, std::vector<int32_t> rows) {
  const Matrix& sv = value(src);
  for (int32_t r : rows)
    if (r < 0 || r >= sv.rows()) throw std::out_of_range("tape: gather row out of bounds");
  Slot s;
  s.op = Op::Gather;
  s.n_parents = 1;
  s.parent[0] = src;
  s.reaches_param = slots_[src].reaches_param;
  const int c = sv.cols(), b = int(rows.size());
  s.value = Matrix(c, b);
  for (int j = 0; j < b; ++j) {
    const double* row = sv.row(rows[j]);
    for (int i = 0; i < c; ++i) s.value(i, j) = row[i];
  }
  s.aux = int(gather_rows_.size());
  gather_rows_.push_back(std::move(rows));
  return push(std::move(s));
}

NodeId Tape::concat(std::span<const NodeId> parts) {
  if (parts.empty()) throw std::invalid_argument("tape: empty concat");
  int rows = 0;
  const int cols = value(parts[0]).cols();
  bool reaches = false;
  for (NodeId p : parts) {
    if (value(p).cols() != cols) throw std::invalid_argument("tape: concat column mismatch");
    rows += value(p).rows();
    reaches = reaches || slots_[p].reaches_param;
  }
  Slot s;
  s.op = Op::Concat;
  s.reaches_param = reaches;
  s.value = Matrix(rows, cols);
  int at = 0;
  for (NodeId p : parts) {
    const Matrix& pv = value(p);
    for (int i = 0; i < pv.rows(); ++i) {
      const double* src = pv.row(i);
      double* dst = s.value.row(at + i);
      for (int j = 0; j < cols; ++j) dst[j] = src[j];
    }
    at += pv.rows();
  }
  s.aux = int(concat_parents_.size());
  concat_parents_.emplace_back(parts.begin(), parts.end());
  return push(std::move(s));
}

NodeId Tape::sum_all(NodeId a) {
  const Matrix& av = value(a);
  Slot s;
  s.op = Op::SumAll;
  s.n_parents = 1;
  s.parent[0] = a;
  s.reaches_param = slots_[a].reaches_param;
  double acc = 0.0;
  for (double v : av.values()) acc += v;
  s.value = Matrix::scalar(acc);
  return push(std::move(s));
}

NodeId Tape::mean_all(NodeId a) {
  const Matrix& av = value(a);
  if (av.size() == 0) throw std::invalid_argument("tape: mean of empty");
  Slot s;
  s.op = Op::MeanAll;
  s.n_parents = 1;
  s.parent[0] = a;
  s.reaches_param = slots_[a].reaches_param;
  double acc = 0.0;
  for (double v : av.values()) acc += v;
  s.value = Matrix::scalar(acc / double(av.size()));
  return push(std::move(s));
}

void Tape::clear() {
  slots_.clear();
  gather_rows_.clear();
  concat_parents_.clear();
}

size_t Tape::value_doubles() const {
  size_t n = 0;
  for (const auto& s : slots_) n += s.value.size();
  return n;
}

void Tape::backward(NodeId root, GradMap& sink) const {
  if (root >= slots_.size()) throw std::invalid_argument("backward: bad root");
  if (!value(root).is_scalar()) throw std::invalid_argument("backward: root must be scalar");

  std::vector<Matrix> adj(slots_.size());
  std::vector<char> has(slots_.size(), 0);
  adj[root] = Matrix::scalar(1.0);
  has[root] = 1;

  auto ensure = [&](NodeId p) -> Matrix& {
    if (!has[p]) {
      const Matrix& v = value(p);
      adj[p] = Matrix(v.rows(), v.cols());
      has[p] = 1;
    }
    return adj[p];
  };
  auto want = [&](NodeId p) { return slots_[p].reaches_param; };

  for (NodeId i = root;; --i) {
    const Slot& s = slots_[i];
    if (has[i] && s.reaches_param) {
      const Matrix& g = adj[i];
      switch (s.op) {
        case Op::Const:
          break;
        case Op::Param:
          acc_bcast(g, sink.grad(s.pid), 1.0);
          break;
        case Op::Add:
          if (want(s.parent[0])) acc_bcast(g, ensure(s.parent[0]), 1.0);
          if (want(s.parent[1])) acc_bcast(g, ensure(s.parent[1]), 1.0);
          break;
        case Op::Sub:
          if (want(s.parent[0])) acc_bcast(g, ensure(s.parent[0]), 1.0);
          if (want(s.parent[1])) acc_bcast(g, ensure(s.parent[1]), -1.0);
          break;
        case Op::Mul:
          if (want(s.parent[0])) acc_mul_bcast(g, value(s.parent[1]), ensure(s.parent[0]), 1.0);
          if (want(s.parent[1])) acc_mul_bcast(g, value(s.parent[0]), ensure(s.parent[1]), 1.0);
          break;
        case Op::Div: {
          const Matrix& bv = value(s.parent[1]);
          if (want(s.parent[0])) {
            Matrix inv_b(bv.rows(), bv.cols());
            ew_unary(bv, inv_b, [](double x) { return 1.0 / x; });
            acc_mul_bcast(g, inv_b, ensure(s.parent[0]), 1.0);
          }
          if (want(s.parent[1])) {
            // d(a/b)/db = -out/b
            Matrix t(s.value.rows(), s.value.cols());
            ew_binary(s.value, bv, t, [](double o, double b2) { return o / b2; });
            acc_mul_bcast(g, t, ensure(s.parent[1]), -1.0);
          }
          break;
        }
        case Op::Neg:
          if (want(s.parent[0])) acc_bcast(g, ensure(s.parent[0]), -1.0);
          break;
        case Op::Square:
          if (want(s.parent[0])) {
            const Matrix& av = value(s.parent[0]);
            Matrix t(av.rows(), av.cols());
            ew_unary(av, t, [](double x) { return 2.0 * x; });
            acc_mul_bcast(g, t, ensure(s.parent[0]), 1.0);
          }
          break;
        case Op::PowInt:
          if (want(s.parent[0])) {
            const Matrix& av = value(s.parent[0]);
            const int n = s.aux;
            Matrix t(av.rows(), av.cols());
            ew_unary(av, t, [n](double x) { return double(n) * std::pow(x, n - 1); });
            acc_mul_bcast(g, t, ensure(s.parent[0]), 1.0);
          }
          break;
        case Op::Sin:
          if (want(s.parent[0])) {
            const Matrix& av = value(s.parent[0]);
            Matrix t(av.rows(), av.cols());
            ew_unary(av, t, [](double x) { return std::cos(x); });
            acc_mul_bcast(g, t, ensure(s.parent[0]), 1.0);
          }
          break;
        case Op::Cos:
          if (want(s.parent[0])) {
            const Matrix& av = value(s.parent[0]);
            Matrix t(av.rows(), av.cols());
            ew_unary(av, t, [](double x) { return std::sin(x); });
            acc_mul_bcast(g, t, ensure(s.parent[0]), -1.0);
          }
          break;
        case Op::Exp:
          if (want(s.parent[0])) acc_mul_bcast(g, s.value, ensure(s.parent[0]), 1.0);
          break;
        case Op::Tanh:
          if (want(s.parent[0])) {
            Matrix t(s.value.rows(), s.value.cols());
            ew_unary(s.value, t, [](double v) { return 1.0 - v * v; });
            acc_mul_bcast(g, t, ensure(s.parent[0]), 1.0);
          }
          break;
        case Op::Affine: {
          const NodeId w = s.parent[0], x = s.parent[1], b = s.parent[2];
          if (want(w)) acc_grad_weight(g, value(x), ensure(w));
          if (want(x)) acc_grad_input(value(w), g, ensure(x));
          if (want(b)) acc_grad_bias(g, ensure(b));
          break;
        }
        case Op::LinMap: {
          const NodeId w = s.parent[0], x = s.parent[1];
          if (want(w)) acc_grad_weight(g, value(x), ensure(w));
          if (want(x)) acc_grad_input(value(w), g, ensure(x));
          break;
        }
        case Op::Gather:
          if (want(s.parent[0])) {
            Matrix& t = ensure(s.parent[0]);
            const auto& rows = gather_rows_[s.aux];
            for (int j = 0; j < int(rows.size()); ++j) {
              double* dst = t.row(rows[j]);
              for (int i = 0; i < g.rows(); ++i) dst[i] += g(i, j);
            }
          }
          break;
        case Op::Concat: {
          const auto& parts = concat_parents_[s.aux];
          int at = 0;
          for (NodeId p : parts) {
            const int pr = value(p).rows();
            if (want(p)) {
              Matrix& t = ensure(p);
              for (int r = 0; r < pr; ++r) {
                const double* src = g.row(at + r);
                double* dst = t.row(r);
                for (int j = 0; j < g.cols(); ++j) dst[j] += src[j];
              }
            }
            at += pr;
          }
          break;
        }
        case Op::SumAll:
          if (want(s.parent[0])) {
            Matrix& t = ensure(s.parent[0]);
            const double gv = g(0, 0);
            for (double& v : t.values()) v += gv;
          }
          break;
        case Op::MeanAll:
          if (want(s.parent[0])) {
            Matrix& t = ensure(s.parent[0]);
            const double gv = g(0, 0) / double(t.size());
            for (double& v : t.values()) v += gv;
          }
          break;
      }
      // Free the adjoint as soon as the node has been processed.
      adj[i] = Matrix();
    }
    if (i == 0) break;
  }
}

}  // namespace pilir
