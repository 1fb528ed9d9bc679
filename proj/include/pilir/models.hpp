// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pilir/grid.hpp"
#include "pilir/mlp.hpp"

namespace pilir {

// Construction-time description of a model; also serialized into
// checkpoint manifests so a checkpoint is self-describing.
struct ModelSpec {
  std::string kind = "pilir";  // pilir | mlp_pinn | wavelet_pinn | interp_grid
  int dim = 2;
  int d_out = 1;
  std::vector<BoundsDim> bounds;
  Weighting weighting = Weighting::Cosine;

  // grid models
  int num_grids = 1;
  std::vector<int> resolution;
  int channels = 4;
  double grid_init = 0.1;

  // synthesis operator (pilir): [C+d, hidden x depth, feature_width]
  int synth_hidden = 16;
  int synth_depth = 2;
  int feature_width = 16;

  // decoding head: [in, head_hidden x head_depth, d_out]; depth 0 gives a
  // single linear projection
  int head_hidden = 16;
  int head_depth = 1;

  // coordinate MLP baselines
  std::vector<int> mlp_hidden = {50, 50, 50};
};

// Shared evaluation interface: coordinates in, physical quantities (and,
// through the jet spec, axis derivatives) out.
class Model {
 public:
  virtual ~Model() = default;
  virtual Jet forward(JetOps& jo, const Matrix& coords) const = 0;
  const ModelSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int d_out() const { return spec_.d_out; }

  // Plain forward on a scratch tape; `out` gets shape (d_out, B).
  void predict(const ParamStore& store, const Matrix& coords, Matrix& out) const;

 protected:
  explicit Model(ModelSpec spec) : spec_(std::move(spec)) {}
  // Unit-cube coordinate jets for each input dimension.
  std::vector<Jet> unit_coords(JetOps& jo, const Matrix& coords) const;
  ModelSpec spec_;
};

class PilirModel : public Model {
 public:
  PilirModel(ParamStore& store, ModelSpec spec, SplitMix64& rng);
  Jet forward(JetOps& jo, const Matrix& coords) const override;
  const FeatureGrid& grid() const { return grid_; }
  const Mlp& synth() const { return synth_; }
  const Mlp& head() const { return head_; }

 private:
  FeatureGrid grid_;
  Mlp synth_;
  Mlp head_;
};

// Deterministic-interpolation baseline: weighted sum of raw latents,
// then the decoding head.
class InterpGridModel : public Model {
 public:
  InterpGridModel(ParamStore& store, ModelSpec spec, SplitMix64& rng);
  Jet forward(JetOps& jo, const Matrix& coords) const override;
  const FeatureGrid& grid() const { return grid_; }
  const Mlp& head() const { return head_; }

 private:
  FeatureGrid grid_;
  Mlp head_;
};

// Coordinate MLP on normalized inputs; covers the plain and
// wavelet-activation baselines.
class CoordinateMlpModel : public Model {
 public:
  CoordinateMlpModel(ParamStore& store, ModelSpec spec, SplitMix64& rng);
  Jet forward(JetOps& jo, const Matrix& coords) const override;
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

std::unique_ptr<Model> make_model(ParamStore& store, const ModelSpec& spec, uint64_t seed);

}  // namespace pilir
