// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pilir/tape.hpp"

namespace pilir {

// Which input axes are differentiated, and to what order (1 or 2).
// Second derivatives are per-axis; no cross terms are propagated.
struct JetSpec {
  std::vector<int> axes;
  int order = 2;

  int count() const { return int(axes.size()); }
  int index_of(int axis) const {
    for (int i = 0; i < count(); ++i)
      if (axes[i] == axis) return i;
    return -1;
  }
  static JetSpec none() { return JetSpec{{}, 2}; }
};

// A value with its directional derivatives, all living on one tape, so
// expressions of d1/d2 stay differentiable with respect to parameters.
// kNoNode marks a component known to be identically zero; propagation
// skips the corresponding arithmetic.
struct Jet {
  NodeId v = kNoNode;
  std::vector<NodeId> d1;  // one per spec axis
  std::vector<NodeId> d2;  // one per spec axis (empty if order 1)
};

// Single-point, single-axis triple per the engine's public contract.
struct Jet2 {
  NodeId v;
  NodeId d1;
  NodeId d2;
};

// Builds jets over a tape. All rules are the order-2 Taylor chain rules
// applied per axis.
class JetOps {
 public:
  JetOps(Tape& tape, JetSpec spec) : t_(tape), spec_(std::move(spec)) {}

  Tape& tape() { return t_; }
  const JetSpec& spec() const { return spec_; }

  // A node with no input dependence (parameters, source terms, anchors).
  Jet lift(NodeId v) const;
  Jet constant(Matrix m) { return lift(t_.constant(std::move(m))); }
  Jet scalar(double v) { return lift(t_.scalar(v)); }

  // Input coordinate row (1,B) for dimension `dim`: d1 seeds to one on the
  // matching spec axis, zero elsewhere; d2 seeds to zero.
  Jet coordinate(const Matrix& values, int dim);

  Jet add(const Jet& a, const Jet& b);
  Jet sub(const Jet& a, const Jet& b);
  Jet mul(const Jet& a, const Jet& b);
  Jet div(const Jet& a, const Jet& b);
  Jet neg(const Jet& a);
  Jet square(const Jet& a);
  Jet sin(const Jet& a);
  Jet cos(const Jet& a);
  Jet exp(const Jet& a);
  Jet tanh(const Jet& a);

  // a*s + c with plain double coefficients (exact chain through d1/d2).
  Jet axpy(const Jet& a, double s, double c);

  Jet affine(NodeId w, const Jet& x, NodeId b);
  Jet concat(std::span<const Jet> parts);

  // Sum of jets (used for weighted feature accumulation).
  Jet accumulate(const Jet& acc, const Jet& term) { return add(acc, term); }

 private:
  // f(v) with chain rules d1' = fp*d1, d2' = fp*d2 + fpp*d1^2.
  Jet chain(const Jet& a, NodeId fv, NodeId fp, NodeId fpp);

  NodeId nadd(NodeId a, NodeId b);  // zero-aware helpers
  NodeId nsub(NodeId a, NodeId b);
  NodeId nmul(NodeId a, NodeId b);

  Tape& t_;
  JetSpec spec_;
};

// Evaluates f at a single point and returns the order-2 jet along `axis`.
// f receives one coordinate jet per input dimension.
Jet2 jet_eval(Tape& tape, const std::function<Jet(JetOps&, std::span<const Jet>)>& f,
              std::span<const double> x, int axis);

}  // namespace pilir
