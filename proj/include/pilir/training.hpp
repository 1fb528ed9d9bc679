// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "pilir/evaluation.hpp"
#include "pilir/models.hpp"
#include "pilir/problems.hpp"
#include "pilir/sampling.hpp"

namespace pilir {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over every tensor in a ParamStore.
class Adam {
 public:
  Adam(const ParamStore& store, AdamConfig cfg);
  void step(ParamStore& store, const GradMap& grads, double lr);
  int64_t steps() const { return step_; }

 private:
  AdamConfig cfg_;
  std::vector<Matrix> m_, v_;
  int64_t step_ = 0;
};

// lr(t) = lr_min + (lr_max - lr_min) * (1 + cos(pi t / T)) / 2
double cosine_lr(int64_t t, int64_t total, double lr_max, double lr_min);

struct LossWeights {
  double residual = 1.0;
  double ic = 1.0;
  double bc = 1.0;
};

// Loss assembled on one tape; parts are the unweighted mean-squared
// terms and total = w_r*r + w_ic*ic + w_bc*bc.
struct LossNodes {
  NodeId total;
  NodeId residual;
  NodeId ic;
  NodeId bc;
};
LossNodes build_loss(Tape& tape, const Model& model, const PdeProblem& p, const PointSets& pts,
                     const LossWeights& w);

struct TrainConfig {
  int64_t epochs = 20000;
  double lr_max = 0.001;
  double lr_min = 1e-6;
  AdamConfig adam;
  LossWeights weights;
  SampleCounts counts;
  uint64_t seed = 100;
  int eval_every = 500;
  int resample_every = 0;  // 0: one fixed point set per run
  int chunk = 1024;        // points per tape pass
};

struct MetricsRecord {
  int64_t epoch;
  double lr;
  double total;
  double residual;
  double ic;
  double bc;
  double rel_l2;
};

struct TrainResult {
  std::vector<MetricsRecord> metrics;
  bool aborted = false;  // non-finite loss; parameters rolled back
  int64_t completed_epochs = 0;
  double final_rel_l2 = std::numeric_limits<double>::quiet_NaN();
};

// Full-batch epoch loop: forward with jets, loss, reverse pass, Adam with
// the cosine schedule. Work is split into fixed-size chunks purely to
// bound tape memory; gradients accumulate over chunks in a fixed order,
// so results are independent of the chunk schedule's execution.
TrainResult train(const PdeProblem& p, const Model& model, ParamStore& store,
                  const TrainConfig& cfg, const EvalGrid* eval_grid,
                  const std::vector<double>* truth,
                  const std::function<void(const MetricsRecord&)>& on_metrics = {});

// Supervised least-squares fit of model(x) to targets; returns max
// absolute error over the training points after the final step.
double fit_supervised(const Model& model, ParamStore& store, const Matrix& xs,
                      const Matrix& targets, int steps, double lr_max, double lr_min,
                      const AdamConfig& adam = {});

}  // namespace pilir
