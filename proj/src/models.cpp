// SPDX-License-Identifier: Apache-2.0
#include "pilir/models.hpp"

#include <stdexcept>

namespace pilir {

namespace {

std::vector<int> synth_sizes(const ModelSpec& s) {
  std::vector<int> sizes{s.channels + s.dim};
  for (int i = 0; i < s.synth_depth; ++i) sizes.push_back(s.synth_hidden);
  sizes.push_back(s.feature_width);
  return sizes;
}

std::vector<int> head_sizes(const ModelSpec& s, int in_width) {
  std::vector<int> sizes{in_width};
  for (int i = 0; i < s.head_depth; ++i) sizes.push_back(s.head_hidden);
  sizes.push_back(s.d_out);
  return sizes;
}

}  // namespace

std::vector<Jet> Model::unit_coords(JetOps& jo, const Matrix& coords) const {
  if (coords.rows() != spec_.dim) throw std::invalid_argument("forward: coordinate dim mismatch");
  const int b = coords.cols();
  std::vector<Jet> unit(spec_.dim);
  for (int k = 0; k < spec_.dim; ++k) {
    Matrix row(1, b);
    for (int j = 0; j < b; ++j) row(0, j) = coords(k, j);
    Jet xk = jo.coordinate(row, k);
    const auto [lo, hi] = spec_.bounds[k];
    unit[k] = jo.axpy(xk, 1.0 / (hi - lo), -lo / (hi - lo));
  }
  return unit;
}

void Model::predict(const ParamStore& store, const Matrix& coords, Matrix& out) const {
  Tape tape(&store);
  JetOps jo(tape, JetSpec::none());
  Jet r = forward(jo, coords);
  out = tape.value(r.v);
}

PilirModel::PilirModel(ParamStore& store, ModelSpec spec, SplitMix64& rng)
    : Model(std::move(spec)),
      grid_(store, spec_.num_grids, spec_.resolution, spec_.channels, spec_.grid_init, rng),
      synth_(store, "synth", synth_sizes(spec_), Activation::Tanh, rng),
      head_(store, "head", head_sizes(spec_, spec_.num_grids * spec_.feature_width),
            Activation::Tanh, rng) {}

Jet PilirModel::forward(JetOps& jo, const Matrix& coords) const {
  Tape& t = jo.tape();
  const int d = spec_.dim;
  const int b = coords.cols();
  const auto& res = grid_.resolution();

  std::vector<Jet> unit = unit_coords(jo, coords);

  // Detached anchors from the plain values; local stays differentiable.
  Matrix unit_plain(d, b);
  for (int k = 0; k < d; ++k) {
    const Matrix& uv = t.value(unit[k].v);
    for (int j = 0; j < b; ++j) unit_plain(k, j) = uv(0, j);
  }
  CellBatch cb = locate_batch(unit_plain, res);

  std::vector<Jet> local(d);
  for (int k = 0; k < d; ++k) {
    Matrix anchor_row(1, b);
    for (int j = 0; j < b; ++j) anchor_row(0, j) = double(cb.anchors[size_t(k) * b + j]);
    local[k] = jo.sub(jo.axpy(unit[k], double(res[k] - 1), 0.0), jo.constant(std::move(anchor_row)));
  }

  std::vector<Jet> w = weight_jets(jo, local, spec_.weighting);

  // Offsets per corner in cell-local units; the bit-1 component is local-1.
  const int nc = 1 << d;
  std::vector<std::array<Jet, 2>> off(d);
  for (int k = 0; k < d; ++k) {
    off[k][0] = local[k];
    off[k][1] = jo.axpy(local[k], 1.0, -1.0);
  }
  std::vector<Jet> corner_dx(nc);
  for (int c = 0; c < nc; ++c) {
    std::vector<Jet> comp(d);
    for (int k = 0; k < d; ++k) comp[k] = off[k][corner_bit(c, k, d)];
    corner_dx[c] = jo.concat(comp);
  }

  std::vector<Jet> fused;
  fused.reserve(grid_.num_grids());
  for (int m = 0; m < grid_.num_grids(); ++m) {
    NodeId grid_node = t.param(grid_.param(m));
    Jet acc;
    for (int c = 0; c < nc; ++c) {
      Jet z = jo.lift(t.gather(grid_node, corner_rows(cb, res, c)));
      std::array<Jet, 2> in_parts{z, corner_dx[c]};
      Jet h = synth_.apply(jo, jo.concat(in_parts));
      Jet contrib = jo.mul(w[c], h);
      acc = (c == 0) ? contrib : jo.add(acc, contrib);
    }
    fused.push_back(acc);
  }
  Jet h = (fused.size() == 1) ? fused[0] : jo.concat(fused);
  return head_.apply(jo, h);
}

InterpGridModel::InterpGridModel(ParamStore& store, ModelSpec spec, SplitMix64& rng)
    : Model(std::move(spec)),
      grid_(store, spec_.num_grids, spec_.resolution, spec_.channels, spec_.grid_init, rng),
      head_(store, "head", head_sizes(spec_, spec_.num_grids * spec_.channels), Activation::Tanh,
            rng) {}

Jet InterpGridModel::forward(JetOps& jo, const Matrix& coords) const {
  Tape& t = jo.tape();
  const int d = spec_.dim;
  const int b = coords.cols();
  const auto& res = grid_.resolution();

  std::vector<Jet> unit = unit_coords(jo, coords);
  Matrix unit_plain(d, b);
  for (int k = 0; k < d; ++k) {
    const Matrix& uv = t.value(unit[k].v);
    for (int j = 0; j < b; ++j) unit_plain(k, j) = uv(0, j);
  }
  CellBatch cb = locate_batch(unit_plain, res);

  std::vector<Jet> local(d);
  for (int k = 0; k < d; ++k) {
    Matrix anchor_row(1, b);
    for (int j = 0; j < b; ++j) anchor_row(0, j) = double(cb.anchors[size_t(k) * b + j]);
    local[k] = jo.sub(jo.axpy(unit[k], double(res[k] - 1), 0.0), jo.constant(std::move(anchor_row)));
  }
  std::vector<Jet> w = weight_jets(jo, local, spec_.weighting);

  const int nc = 1 << d;
  std::vector<Jet> fused;
  fused.reserve(grid_.num_grids());
  for (int m = 0; m < grid_.num_grids(); ++m) {
    NodeId grid_node = t.param(grid_.param(m));
    Jet acc;
    for (int c = 0; c < nc; ++c) {
      Jet z = jo.lift(t.gather(grid_node, corner_rows(cb, res, c)));
      Jet contrib = jo.mul(w[c], z);
      acc = (c == 0) ? contrib : jo.add(acc, contrib);
    }
    fused.push_back(acc);
  }
  Jet h = (fused.size() == 1) ? fused[0] : jo.concat(fused);
  return head_.apply(jo, h);
}

CoordinateMlpModel::CoordinateMlpModel(ParamStore& store, ModelSpec spec, SplitMix64& rng)
    : Model(std::move(spec)),
      net_(store, "net",
           [&] {
             std::vector<int> sizes{spec_.dim};
             for (int h : spec_.mlp_hidden) sizes.push_back(h);
             sizes.push_back(spec_.d_out);
             return sizes;
           }(),
           spec_.kind == "wavelet_pinn" ? Activation::GaussianWavelet : Activation::Tanh, rng) {}

Jet CoordinateMlpModel::forward(JetOps& jo, const Matrix& coords) const {
  std::vector<Jet> unit = unit_coords(jo, coords);
  return net_.apply(jo, jo.concat(unit));
}

std::unique_ptr<Model> make_model(ParamStore& store, const ModelSpec& spec, uint64_t seed) {
  SplitMix64 rng(SplitMix64::substream(seed, 0x6d6f64));
  if (int(spec.bounds.size()) != spec.dim)
    throw std::invalid_argument("make_model: bounds/dim mismatch");
  if (spec.kind == "pilir") return std::make_unique<PilirModel>(store, spec, rng);
  if (spec.kind == "interp_grid") return std::make_unique<InterpGridModel>(store, spec, rng);
  if (spec.kind == "mlp_pinn" || spec.kind == "wavelet_pinn")
    return std::make_unique<CoordinateMlpModel>(store, spec, rng);
  throw std::invalid_argument("unknown model kind: " + spec.kind);
}

}  // namespace pilir
