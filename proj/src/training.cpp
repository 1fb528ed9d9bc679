// SPDX-License-Identifier: Apache-2.0
#include "pilir/training.hpp"

#include <cmath>
#include <numbers>

namespace pilir {

Adam::Adam(const ParamStore& store, AdamConfig cfg) : cfg_(cfg) {
  m_.reserve(store.count());
  v_.reserve(store.count());
  for (ParamId i = 0; i < store.count(); ++i) {
    const Matrix& p = store.value(i);
    m_.emplace_back(p.rows(), p.cols());
    v_.emplace_back(p.rows(), p.cols());
  }
}

void Adam::step(ParamStore& store, const GradMap& grads, double lr) {
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, double(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, double(step_));
  for (ParamId i = 0; i < store.count(); ++i) {
    auto& p = store.value(i).values();
    auto& m = m_[i].values();
    auto& v = v_[i].values();
    const auto& g = grads.grad(i).values();
    if (g.size() != p.size()) throw std::invalid_argument("adam: shape mismatch");
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p[k] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

double cosine_lr(int64_t t, int64_t total, double lr_max, double lr_min) {
  if (t < 0 || t > total) throw std::invalid_argument("cosine_lr: t outside [0,T]");
  if (total == 0) return lr_max;
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * double(t) / double(total)));
}

namespace {

Matrix slice_cols(const Matrix& m, int at, int n) {
  Matrix out(m.rows(), n);
  for (int r = 0; r < m.rows(); ++r) {
    const double* src = m.row(r) + at;
    double* dst = out.row(r);
    for (int j = 0; j < n; ++j) dst[j] = src[j];
  }
  return out;
}

// Sum over the batch of squared residuals for one chunk.
NodeId residual_sq_sum(Tape& tape, const Model& model, const PdeProblem& p, const Matrix& pts) {
  JetOps jo(tape, interior_jet_spec(p));
  Jet u = model.forward(jo, pts);
  NodeId r = p.residual(jo, u, pts);
  return tape.sum_all(tape.square(r));
}

NodeId target_sq_sum(Tape& tape, const Model& model, const Matrix& pts, const Matrix& targets) {
  JetOps jo(tape, JetSpec::none());
  Jet u = model.forward(jo, pts);
  return tape.sum_all(tape.square(tape.sub(u.v, tape.constant(targets))));
}

// Squared mismatch sums for one chunk of periodic pairs, one entry per
// declared order.
std::vector<NodeId> periodic_sq_sums(Tape& tape, const Model& model, const PdeProblem& p,
                                     const PeriodicPairs& pairs, const Matrix& a, const Matrix& b) {
  JetSpec spec = boundary_jet_spec(p);
  JetOps jo(tape, spec);
  Jet ua = model.forward(jo, a);
  Jet ub = model.forward(jo, b);
  std::vector<NodeId> sums;
  for (int order : pairs.orders) {
    NodeId da, db;
    if (order == 0) {
      da = ua.v;
      db = ub.v;
    } else {
      da = jet_d1(jo, ua, pairs.dim);
      db = jet_d1(jo, ub, pairs.dim);
    }
    sums.push_back(tape.sum_all(tape.square(tape.sub(da, db))));
  }
  return sums;
}

struct EpochLoss {
  double residual = 0.0;
  double ic = 0.0;
  double bc = 0.0;
  double total = 0.0;
  bool finite() const {
    return std::isfinite(residual) && std::isfinite(ic) && std::isfinite(bc) &&
           std::isfinite(total);
  }
};

// One full pass over the point sets: loss values plus (when grads is
// non-null) accumulated parameter gradients of the weighted total.
EpochLoss epoch_pass(Tape& tape, const Model& model, const PdeProblem& p, const PointSets& pts,
                     const LossWeights& w, int chunk, GradMap* grads) {
  EpochLoss out;

  auto run_chunks = [&](const Matrix& all, auto make_node, double weight_over_n, double& sum_out) {
    const int n = all.cols();
    for (int at = 0; at < n; at += chunk) {
      const int b = std::min(chunk, n - at);
      tape.clear();
      Matrix part = slice_cols(all, at, b);
      NodeId s = make_node(part, at, b);
      sum_out += tape.scalar_value(s);
      if (grads) tape.backward(tape.scale(s, weight_over_n), *grads);
    }
  };

  if (pts.interior.cols() > 0) {
    double sum = 0.0;
    run_chunks(
        pts.interior,
        [&](const Matrix& part, int, int) { return residual_sq_sum(tape, model, p, part); },
        w.residual / double(pts.interior.cols()), sum);
    out.residual = sum / double(pts.interior.cols());
  }

  if (pts.initial.cols() > 0) {
    double sum = 0.0;
    run_chunks(
        pts.initial,
        [&](const Matrix& part, int at, int b) {
          return target_sq_sum(tape, model, part, slice_cols(pts.initial_targets, at, b));
        },
        w.ic / double(pts.initial.cols()), sum);
    out.ic = sum / double(pts.initial.cols());
  }

  if (pts.dirichlet.cols() > 0) {
    double sum = 0.0;
    run_chunks(
        pts.dirichlet,
        [&](const Matrix& part, int at, int b) {
          return target_sq_sum(tape, model, part, slice_cols(pts.dirichlet_targets, at, b));
        },
        w.bc / double(pts.dirichlet.cols()), sum);
    out.bc += sum / double(pts.dirichlet.cols());
  }

  for (const auto& pairs : pts.periodic) {
    const int n = pairs.a.cols();
    std::vector<double> sums(pairs.orders.size(), 0.0);
    for (int at = 0; at < n; at += chunk) {
      const int b = std::min(chunk, n - at);
      tape.clear();
      Matrix pa = slice_cols(pairs.a, at, b);
      Matrix pb = slice_cols(pairs.b, at, b);
      std::vector<NodeId> nodes = periodic_sq_sums(tape, model, p, pairs, pa, pb);
      NodeId scaled = kNoNode;
      for (size_t i = 0; i < nodes.size(); ++i) {
        sums[i] += tape.scalar_value(nodes[i]);
        NodeId s = tape.scale(nodes[i], w.bc / double(n));
        scaled = (scaled == kNoNode) ? s : tape.add(scaled, s);
      }
      if (grads) tape.backward(scaled, *grads);
    }
    for (double s : sums) out.bc += s / double(n);
  }

  out.total = w.residual * out.residual + w.ic * out.ic + w.bc * out.bc;
  return out;
}

}  // namespace

LossNodes build_loss(Tape& tape, const Model& model, const PdeProblem& p, const PointSets& pts,
                     const LossWeights& w) {
  LossNodes out;
  out.residual = (pts.interior.cols() > 0)
                     ? tape.scale(residual_sq_sum(tape, model, p, pts.interior),
                                  1.0 / double(pts.interior.cols()))
                     : tape.scalar(0.0);
  out.ic = (pts.initial.cols() > 0)
               ? tape.scale(target_sq_sum(tape, model, pts.initial, pts.initial_targets),
                            1.0 / double(pts.initial.cols()))
               : tape.scalar(0.0);
  NodeId bc = tape.scalar(0.0);
  if (pts.dirichlet.cols() > 0)
    bc = tape.add(bc, tape.scale(target_sq_sum(tape, model, pts.dirichlet, pts.dirichlet_targets),
                                 1.0 / double(pts.dirichlet.cols())));
  for (const auto& pairs : pts.periodic) {
    std::vector<NodeId> nodes = periodic_sq_sums(tape, model, p, pairs, pairs.a, pairs.b);
    for (NodeId s : nodes) bc = tape.add(bc, tape.scale(s, 1.0 / double(pairs.a.cols())));
  }
  out.bc = bc;
  out.total = tape.add(tape.add(tape.scale(out.residual, w.residual), tape.scale(out.ic, w.ic)),
                       tape.scale(out.bc, w.bc));
  return out;
}

TrainResult train(const PdeProblem& p, const Model& model, ParamStore& store,
                  const TrainConfig& cfg, const EvalGrid* eval_grid,
                  const std::vector<double>* truth,
                  const std::function<void(const MetricsRecord&)>& on_metrics) {
  TrainResult result;
  if (cfg.epochs < 0) throw std::invalid_argument("train: negative epochs");

  SampleCounts counts = cfg.counts;
  if (!p.has_time) counts.initial = 0;
  PointSets pts = sample(p, counts, cfg.seed);

  Tape tape(&store);
  GradMap grads;
  grads.init(store);
  Adam adam(store, cfg.adam);

  std::vector<Matrix> last_good;
  last_good.reserve(store.count());
  for (ParamId i = 0; i < store.count(); ++i) last_good.push_back(store.value(i));

  auto eval_now = [&]() -> double {
    if (!eval_grid || !truth) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> pred = predict_grid(model, store, *eval_grid);
    return rel_l2(*truth, pred);
  };

  for (int64_t e = 0; e < cfg.epochs; ++e) {
    if (cfg.resample_every > 0 && e > 0 && e % cfg.resample_every == 0)
      pts = sample(p, counts, cfg.seed + uint64_t(e / cfg.resample_every));

    const double lr = cosine_lr(e, cfg.epochs, cfg.lr_max, cfg.lr_min);
    grads.zero();
    EpochLoss loss = epoch_pass(tape, model, p, pts, cfg.weights, cfg.chunk, &grads);

    if (!loss.finite()) {
      for (ParamId i = 0; i < store.count(); ++i) store.value(i) = last_good[i];
      result.aborted = true;
      break;
    }
    for (ParamId i = 0; i < store.count(); ++i) last_good[i] = store.value(i);

    adam.step(store, grads, lr);
    result.completed_epochs = e + 1;

    const bool do_eval = ((e + 1) % cfg.eval_every == 0) || (e + 1 == cfg.epochs);
    if (do_eval) {
      MetricsRecord rec{e + 1, lr, loss.total, loss.residual, loss.ic, loss.bc, eval_now()};
      result.metrics.push_back(rec);
      if (on_metrics) on_metrics(rec);
    }
  }

  result.final_rel_l2 = eval_now();
  return result;
}

double fit_supervised(const Model& model, ParamStore& store, const Matrix& xs,
                      const Matrix& targets, int steps, double lr_max, double lr_min,
                      const AdamConfig& adam_cfg) {
  Tape tape(&store);
  GradMap grads;
  grads.init(store);
  Adam adam(store, adam_cfg);
  const double inv_n = 1.0 / double(xs.cols());
  for (int s = 0; s < steps; ++s) {
    tape.clear();
    grads.zero();
    JetOps jo(tape, JetSpec::none());
    Jet u = model.forward(jo, xs);
    NodeId sq = tape.sum_all(tape.square(tape.sub(u.v, tape.constant(targets))));
    tape.backward(tape.scale(sq, inv_n), grads);
    adam.step(store, grads, cosine_lr(s, steps, lr_max, lr_min));
  }
  Matrix pred;
  model.predict(store, xs, pred);
  double mx = 0.0;
  for (int j = 0; j < xs.cols(); ++j) mx = std::max(mx, std::abs(pred(0, j) - targets(0, j)));
  return mx;
}

}  // namespace pilir
