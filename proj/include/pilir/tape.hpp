// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pilir/matrix.hpp"
#include "pilir/params.hpp"

namespace pilir {

using NodeId = uint32_t;
inline constexpr NodeId kNoNode = UINT32_MAX;

enum class Op : uint8_t {
  Const,
  Param,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Square,
  PowInt,
  Sin,
  Cos,
  Exp,
  Tanh,
  Affine,   // W x + b
  LinMap,   // W x (no bias)
  Gather,   // rows of a (V,C) source, one per batch column -> (C,B)
  Concat,   // stack parents along rows
  SumAll,   // sum of all entries -> (1,1)
  MeanAll,  // mean of all entries -> (1,1)
};

// Dynamic computation graph. Nodes are appended in topological order
// (parents always precede children) and hold dense matrix values; a
// batch of points is one node with one column per point. A tape is
// single-writer; use one tape per worker.
class Tape {
 public:
  explicit Tape(const ParamStore* params = nullptr) : params_(params) {}

  NodeId constant(Matrix v);
  NodeId scalar(double v) { return constant(Matrix::scalar(v)); }
  NodeId param(ParamId id);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId neg(NodeId a);
  NodeId square(NodeId a);
  NodeId pow_int(NodeId a, int n);
  NodeId sin(NodeId a);
  NodeId cos(NodeId a);
  NodeId exp(NodeId a);
  NodeId tanh(NodeId a);

  NodeId affine(NodeId w, NodeId x, NodeId b);
  NodeId linmap(NodeId w, NodeId x);
  NodeId gather(NodeId src, std::vector<int32_t> rows);
  NodeId concat(std::span<const NodeId> parts);
  NodeId sum_all(NodeId a);
  NodeId mean_all(NodeId a);

  // Convenience: a * s for plain double s (s becomes a shared constant).
  NodeId scale(NodeId a, double s) { return mul(a, scalar(s)); }
  NodeId add_const(NodeId a, double s) { return add(a, scalar(s)); }

  const Matrix& value(NodeId id) const {
    const Slot& s = slots_[id];
    return s.pvalue ? *s.pvalue : s.value;
  }
  double scalar_value(NodeId id) const { return value(id)(0, 0); }
  Op op(NodeId id) const { return slots_[id].op; }
  bool reaches_param(NodeId id) const { return slots_[id].reaches_param; }

  // Reverse pass from a scalar root; parameter gradients are ADDED into
  // `sink`. Adjoint buffers are local to the call, so repeating it on an
  // unchanged tape contributes the same gradients again.
  void backward(NodeId root, GradMap& sink) const;

  void clear();
  size_t size() const { return slots_.size(); }
  size_t value_doubles() const;

  const ParamStore* params() const { return params_; }

 private:
  struct Slot {
    Op op;
    uint8_t n_parents = 0;
    bool reaches_param = false;
    int aux = 0;  // PowInt exponent; Gather/Concat pool index
    NodeId parent[3] = {kNoNode, kNoNode, kNoNode};
    ParamId pid = -1;
    Matrix value;               // owned (non-param nodes)
    const Matrix* pvalue = nullptr;  // param nodes view the store
  };

  NodeId push(Slot s);
  NodeId binary(Op op, NodeId a, NodeId b);
  NodeId unary(Op op, NodeId a);
  static void broadcast_shape(const Matrix& a, const Matrix& b, int& r, int& c);

  const ParamStore* params_;
  std::vector<Slot> slots_;
  std::vector<std::vector<int32_t>> gather_rows_;
  std::vector<std::vector<NodeId>> concat_parents_;
};

}  // namespace pilir
