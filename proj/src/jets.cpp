// SPDX-License-Identifier: Apache-2.0
#include "pilir/jets.hpp"

namespace pilir {

NodeId JetOps::nadd(NodeId a, NodeId b) {
  if (a == kNoNode) return b;
  if (b == kNoNode) return a;
  return t_.add(a, b);
}

NodeId JetOps::nsub(NodeId a, NodeId b) {
  if (b == kNoNode) return a;
  if (a == kNoNode) return t_.neg(b);
  return t_.sub(a, b);
}

NodeId JetOps::nmul(NodeId a, NodeId b) {
  if (a == kNoNode || b == kNoNode) return kNoNode;
  return t_.mul(a, b);
}

Jet JetOps::lift(NodeId v) const {
  Jet j;
  j.v = v;
  j.d1.assign(spec_.count(), kNoNode);
  if (spec_.order >= 2) j.d2.assign(spec_.count(), kNoNode);
  return j;
}

Jet JetOps::coordinate(const Matrix& values, int dim) {
  Jet j = lift(t_.constant(values));
  const int k = spec_.index_of(dim);
  if (k >= 0) j.d1[k] = t_.constant(Matrix(values.rows(), values.cols(), 1.0));
  return j;
}

Jet JetOps::add(const Jet& a, const Jet& b) {
  Jet out = lift(t_.add(a.v, b.v));
  for (int k = 0; k < spec_.count(); ++k) {
    out.d1[k] = nadd(a.d1[k], b.d1[k]);
    if (spec_.order >= 2) out.d2[k] = nadd(a.d2[k], b.d2[k]);
  }
  return out;
}

Jet JetOps::sub(const Jet& a, const Jet& b) {
  Jet out = lift(t_.sub(a.v, b.v));
  for (int k = 0; k < spec_.count(); ++k) {
    out.d1[k] = nsub(a.d1[k], b.d1[k]);
    if (spec_.order >= 2) out.d2[k] = nsub(a.d2[k], b.d2[k]);
  }
  return out;
}

Jet JetOps::mul(const Jet& a, const Jet& b) {
  Jet out = lift(t_.mul(a.v, b.v));
  for (int k = 0; k < spec_.count(); ++k) {
    out.d1[k] = nadd(nmul(a.d1[k], b.v), nmul(a.v, b.d1[k]));
    if (spec_.order >= 2) {
      NodeId cross = nmul(a.d1[k], b.d1[k]);
      if (cross != kNoNode) cross = t_.scale(cross, 2.0);
      out.d2[k] = nadd(nadd(nmul(a.d2[k], b.v), cross), nmul(a.v, b.d2[k]));
    }
  }
  return out;
}

Jet JetOps::div(const Jet& a, const Jet& b) {
  Jet out = lift(t_.div(a.v, b.v));
  for (int k = 0; k < spec_.count(); ++k) {
    NodeId num1 = nsub(a.d1[k], nmul(out.v, b.d1[k]));
    out.d1[k] = (num1 == kNoNode) ? kNoNode : t_.div(num1, b.v);
    if (spec_.order >= 2) {
      NodeId cross = nmul(out.d1[k], b.d1[k]);
      if (cross != kNoNode) cross = t_.scale(cross, 2.0);
      NodeId num2 = nsub(nsub(a.d2[k], cross), nmul(out.v, b.d2[k]));
      out.d2[k] = (num2 == kNoNode) ? kNoNode : t_.div(num2, b.v);
    }
  }
  return out;
}

Jet JetOps::neg(const Jet& a) {
  Jet out = lift(t_.neg(a.v));
  for (int k = 0; k < spec_.count(); ++k) {
    if (a.d1[k] != kNoNode) out.d1[k] = t_.neg(a.d1[k]);
    if (spec_.order >= 2 && a.d2[k] != kNoNode) out.d2[k] = t_.neg(a.d2[k]);
  }
  return out;
}

Jet JetOps::axpy(const Jet& a, double s, double c) {
  NodeId v = a.v;
  if (s != 1.0) v = t_.scale(v, s);
  if (c != 0.0) v = t_.add_const(v, c);
  Jet out = lift(v);
  for (int k = 0; k < spec_.count(); ++k) {
    if (a.d1[k] != kNoNode) out.d1[k] = (s == 1.0) ? a.d1[k] : t_.scale(a.d1[k], s);
    if (spec_.order >= 2 && a.d2[k] != kNoNode)
      out.d2[k] = (s == 1.0) ? a.d2[k] : t_.scale(a.d2[k], s);
  }
  return out;
}

Jet JetOps::chain(const Jet& a, NodeId fv, NodeId fp, NodeId fpp) {
  Jet out = lift(fv);
  for (int k = 0; k < spec_.count(); ++k) {
    out.d1[k] = nmul(fp, a.d1[k]);
    if (spec_.order >= 2) {
      NodeId t1 = nmul(fp, a.d2[k]);
      NodeId t2 = kNoNode;
      if (fpp != kNoNode && a.d1[k] != kNoNode) t2 = t_.mul(fpp, t_.square(a.d1[k]));
      out.d2[k] = nadd(t1, t2);
    }
  }
  return out;
}

Jet JetOps::square(const Jet& a) {
  NodeId fv = t_.square(a.v);
  NodeId fp = t_.scale(a.v, 2.0);
  NodeId fpp = (spec_.order >= 2) ? t_.scalar(2.0) : kNoNode;
  return chain(a, fv, fp, fpp);
}

Jet JetOps::sin(const Jet& a) {
  NodeId sv = t_.sin(a.v);
  NodeId cv = t_.cos(a.v);
  return chain(a, sv, cv, (spec_.order >= 2) ? t_.neg(sv) : kNoNode);
}

Jet JetOps::cos(const Jet& a) {
  NodeId cv = t_.cos(a.v);
  NodeId sv = t_.sin(a.v);
  return chain(a, cv, t_.neg(sv), (spec_.order >= 2) ? t_.neg(cv) : kNoNode);
}

Jet JetOps::exp(const Jet& a) {
  NodeId ev = t_.exp(a.v);
  return chain(a, ev, ev, (spec_.order >= 2) ? ev : kNoNode);
}

Jet JetOps::tanh(const Jet& a) {
  NodeId tv = t_.tanh(a.v);
  // fp = 1 - t^2, fpp = -2 t (1 - t^2)
  NodeId fp = t_.sub(t_.scalar(1.0), t_.square(tv));
  NodeId fpp = kNoNode;
  if (spec_.order >= 2) fpp = t_.mul(t_.scale(tv, -2.0), fp);
  return chain(a, tv, fp, fpp);
}

Jet JetOps::affine(NodeId w, const Jet& x, NodeId b) {
  Jet out = lift(t_.affine(w, x.v, b));
  for (int k = 0; k < spec_.count(); ++k) {
    if (x.d1[k] != kNoNode) out.d1[k] = t_.linmap(w, x.d1[k]);
    if (spec_.order >= 2 && x.d2[k] != kNoNode) out.d2[k] = t_.linmap(w, x.d2[k]);
  }
  return out;
}

Jet JetOps::concat(std::span<const Jet> parts) {
  std::vector<NodeId> vs;
  vs.reserve(parts.size());
  for (const Jet& p : parts) vs.push_back(p.v);
  Jet out = lift(t_.concat(vs));

  auto build = [&](auto get) -> NodeId {
    bool any = false;
    for (const Jet& p : parts)
      if (get(p) != kNoNode) any = true;
    if (!any) return kNoNode;
    std::vector<NodeId> comp;
    comp.reserve(parts.size());
    for (const Jet& p : parts) {
      NodeId c = get(p);
      if (c == kNoNode) {
        const Matrix& pv = t_.value(p.v);
        c = t_.constant(Matrix(pv.rows(), pv.cols()));
      }
      comp.push_back(c);
    }
    return t_.concat(comp);
  };

  for (int k = 0; k < spec_.count(); ++k) {
    out.d1[k] = build([&](const Jet& p) { return p.d1[k]; });
    if (spec_.order >= 2) out.d2[k] = build([&](const Jet& p) { return p.d2[k]; });
  }
  return out;
}

Jet2 jet_eval(Tape& tape, const std::function<Jet(JetOps&, std::span<const Jet>)>& f,
              std::span<const double> x, int axis) {
  if (axis < 0 || axis >= int(x.size())) throw std::invalid_argument("jet_eval: bad axis");
  JetOps jo(tape, JetSpec{{axis}, 2});
  std::vector<Jet> coords;
  coords.reserve(x.size());
  for (int d = 0; d < int(x.size()); ++d) coords.push_back(jo.coordinate(Matrix::scalar(x[d]), d));
  Jet r = f(jo, coords);
  Jet2 out;
  out.v = r.v;
  const Matrix& rv = tape.value(r.v);
  out.d1 = (r.d1[0] != kNoNode) ? r.d1[0] : tape.constant(Matrix(rv.rows(), rv.cols()));
  out.d2 = (r.d2[0] != kNoNode) ? r.d2[0] : tape.constant(Matrix(rv.rows(), rv.cols()));
  return out;
}

}  // namespace pilir
