// SPDX-License-Identifier: Apache-2.0
#include "pilir/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pilir {

std::vector<double> normalize(std::span<const double> x, std::span<const BoundsDim> bounds) {
  if (x.size() != bounds.size()) throw std::invalid_argument("normalize: dimension mismatch");
  std::vector<double> u(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const auto [lo, hi] = bounds[i];
    if (!(lo < hi)) throw std::invalid_argument("normalize: empty bounds");
    const double tol = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (x[i] < lo - tol || x[i] > hi + tol)
      throw std::out_of_range("normalize: coordinate outside domain (dim " + std::to_string(i) +
                              ")");
    double v = (x[i] - lo) / (hi - lo);
    u[i] = std::min(1.0, std::max(0.0, v));
  }
  return u;
}

CellLocation locate(std::span<const double> u, std::span<const int> resolution) {
  if (u.size() != resolution.size()) throw std::invalid_argument("locate: dimension mismatch");
  CellLocation loc;
  loc.anchor.resize(u.size());
  loc.local.resize(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    const int n = resolution[i];
    if (n < 2) throw std::invalid_argument("locate: resolution must be >= 2");
    const double scaled = u[i] * double(n - 1);
    int a = int(std::floor(scaled));
    if (a > n - 2) a = n - 2;
    if (a < 0) a = 0;
    loc.anchor[i] = a;
    loc.local[i] = scaled - double(a);
  }
  return loc;
}

int vertex_index(std::span<const int> v, std::span<const int> resolution) {
  int idx = 0;
  for (size_t i = 0; i < v.size(); ++i) idx = idx * resolution[i] + v[i];
  return idx;
}

std::vector<double> weights_multilinear(std::span<const double> local) {
  const int d = int(local.size());
  std::vector<double> w(size_t(1) << d);
  for (int c = 0; c < int(w.size()); ++c) {
    double p = 1.0;
    for (int k = 0; k < d; ++k) p *= corner_bit(c, k, d) ? local[k] : 1.0 - local[k];
    w[c] = p;
  }
  return w;
}

std::vector<double> weights_cosine(std::span<const double> local) {
  const int d = int(local.size());
  std::vector<double> f1(d);
  for (int k = 0; k < d; ++k) f1[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * local[k]));
  std::vector<double> w(size_t(1) << d);
  for (int c = 0; c < int(w.size()); ++c) {
    double p = 1.0;
    for (int k = 0; k < d; ++k) p *= corner_bit(c, k, d) ? f1[k] : 1.0 - f1[k];
    w[c] = p;
  }
  return w;
}

CellQuery cell_query(std::span<const double> u, std::span<const int> resolution, Weighting w) {
  CellLocation loc = locate(u, resolution);
  const int d = int(u.size());
  const int nc = 1 << d;
  CellQuery q;
  q.anchor = loc.anchor;
  q.local = loc.local;
  q.corners.resize(nc);
  q.offsets.resize(nc);
  std::vector<int> v(d);
  for (int c = 0; c < nc; ++c) {
    q.offsets[c].resize(d);
    for (int k = 0; k < d; ++k) {
      const int bit = corner_bit(c, k, d);
      v[k] = loc.anchor[k] + bit;
      q.offsets[c][k] = loc.local[k] - double(bit);
    }
    q.corners[c] = vertex_index(v, resolution);
  }
  q.weights = (w == Weighting::Multilinear) ? weights_multilinear(loc.local)
                                            : weights_cosine(loc.local);
  return q;
}

FeatureGrid::FeatureGrid(ParamStore& store, int num_grids, std::vector<int> resolution,
                         int channels, double init_range, SplitMix64& rng)
    : num_grids_(num_grids), channels_(channels), resolution_(std::move(resolution)) {
  if (num_grids < 1 || channels < 1) throw std::invalid_argument("FeatureGrid: bad shape");
  for (int n : resolution_)
    if (n < 2) throw std::invalid_argument("FeatureGrid: resolution must be >= 2");
  const int v = verts_per_grid();
  std::vector<int> shape = resolution_;
  shape.push_back(channels_);
  for (int m = 0; m < num_grids_; ++m) {
    Matrix init(v, channels_);
    for (double& x : init.values()) x = rng.uniform(-init_range, init_range);
    params_.push_back(store.add("grid." + std::to_string(m) + ".values", shape, std::move(init)));
  }
}

int FeatureGrid::verts_per_grid() const {
  int v = 1;
  for (int n : resolution_) v *= n;
  return v;
}

CellBatch locate_batch(const Matrix& unit, std::span<const int> resolution) {
  const int d = unit.rows(), b = unit.cols();
  if (d != int(resolution.size())) throw std::invalid_argument("locate_batch: dim mismatch");
  CellBatch cb;
  cb.dim = d;
  cb.batch = b;
  cb.anchors.resize(size_t(d) * b);
  cb.local = Matrix(d, b);
  for (int k = 0; k < d; ++k) {
    const int n = resolution[k];
    const double* ur = unit.row(k);
    double* lr = cb.local.row(k);
    int32_t* ar = cb.anchors.data() + size_t(k) * b;
    for (int j = 0; j < b; ++j) {
      const double scaled = ur[j] * double(n - 1);
      int a = int(std::floor(scaled));
      if (a > n - 2) a = n - 2;
      if (a < 0) a = 0;
      ar[j] = a;
      lr[j] = scaled - double(a);
    }
  }
  return cb;
}

std::vector<int32_t> corner_rows(const CellBatch& cb, std::span<const int> resolution, int corner) {
  const int d = cb.dim, b = cb.batch;
  std::vector<int32_t> rows(b);
  for (int j = 0; j < b; ++j) {
    int idx = 0;
    for (int k = 0; k < d; ++k) {
      const int v = cb.anchors[size_t(k) * b + j] + corner_bit(corner, k, d);
      idx = idx * resolution[k] + v;
    }
    rows[j] = idx;
  }
  return rows;
}

std::vector<Jet> weight_jets(JetOps& jo, std::span<const Jet> local, Weighting w) {
  const int d = int(local.size());
  Tape& t = jo.tape();
  std::vector<Jet> f1(d);  // bit-1 axis factor
  for (int k = 0; k < d; ++k) {
    if (w == Weighting::Multilinear) {
      f1[k] = local[k];
    } else {
      // 0.5 * (1 - cos(pi * t))
      Jet c = jo.cos(jo.axpy(local[k], std::numbers::pi, 0.0));
      f1[k] = jo.axpy(c, -0.5, 0.5);
    }
  }
  std::vector<Jet> f0(d);
  const Jet one = jo.scalar(1.0);
  for (int k = 0; k < d; ++k) f0[k] = jo.sub(one, f1[k]);

  const int nc = 1 << d;
  std::vector<Jet> out(nc);
  for (int c = 0; c < nc; ++c) {
    Jet p = corner_bit(c, 0, d) ? f1[0] : f0[0];
    for (int k = 1; k < d; ++k) p = jo.mul(p, corner_bit(c, k, d) ? f1[k] : f0[k]);
    out[c] = p;
  }
  (void)t;
  return out;
}

}  // namespace pilir
