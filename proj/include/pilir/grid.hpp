// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "pilir/jets.hpp"
#include "pilir/params.hpp"
#include "pilir/rng.hpp"

namespace pilir {

struct BoundsDim {
  double lo;
  double hi;
};

enum class Weighting { Multilinear, Cosine };

// Maps a physical coordinate into [0,1]^d. Points within 1e-12 of the
// bounds are clamped; anything farther outside is an error.
std::vector<double> normalize(std::span<const double> x, std::span<const BoundsDim> bounds);

// Cell lookup for a unit coordinate. With N vertices per dimension there
// are N-1 cells; anchor_i = floor(u_i * (N_i - 1)) clamped to N_i - 2, so
// u = 1 lands in the last cell with local = 1.
struct CellLocation {
  std::vector<int> anchor;
  std::vector<double> local;
};
CellLocation locate(std::span<const double> u, std::span<const int> resolution);

// Corner ordering: corner c of a d-cell uses bit (d-1-k) of c for
// dimension k, i.e. the last dimension varies fastest, matching the
// row-major flat vertex layout.
inline int corner_bit(int corner, int dim_index, int d) { return (corner >> (d - 1 - dim_index)) & 1; }

// Flat vertex index of multi-index `v` in a grid with `resolution`
// vertices per dimension (row-major, last dimension fastest).
int vertex_index(std::span<const int> v, std::span<const int> resolution);

// Full single-point query: anchor, local position, the 2^d corner flat
// indices, relative offsets (local - corner bit, each in [-1,1]) and
// spatial weights.
struct CellQuery {
  std::vector<int> anchor;
  std::vector<double> local;
  std::vector<int> corners;
  std::vector<std::vector<double>> offsets;
  std::vector<double> weights;
};
CellQuery cell_query(std::span<const double> u, std::span<const int> resolution, Weighting w);

// Plain-double weights for one local position.
std::vector<double> weights_multilinear(std::span<const double> local);
std::vector<double> weights_cosine(std::span<const double> local);

// M parallel grids of learnable latent vectors over the unit cube. Each
// grid is one parameter tensor "grid.{m}.values" stored as a
// (vertices, channels) matrix.
class FeatureGrid {
 public:
  FeatureGrid() = default;
  // Registers M parameter tensors initialized uniformly in
  // [-init_range, init_range].
  FeatureGrid(ParamStore& store, int num_grids, std::vector<int> resolution, int channels,
              double init_range, SplitMix64& rng);

  int num_grids() const { return num_grids_; }
  int channels() const { return channels_; }
  int dim() const { return int(resolution_.size()); }
  const std::vector<int>& resolution() const { return resolution_; }
  int verts_per_grid() const;
  ParamId param(int m) const { return params_[m]; }

 private:
  int num_grids_ = 0;
  int channels_ = 0;
  std::vector<int> resolution_;
  std::vector<ParamId> params_;
};

// Batched lookup state shared by every grid of a model: anchors are
// detached integers; `local` stays differentiable through the jets built
// by the caller.
struct CellBatch {
  int dim = 0;
  int batch = 0;
  std::vector<int32_t> anchors;  // dim * batch, anchor[d*batch + j]
  Matrix local;                  // (dim, batch)
};
CellBatch locate_batch(const Matrix& unit, std::span<const int> resolution);

// Flat rows into a (V,C) grid tensor for one corner of every batch point.
std::vector<int32_t> corner_rows(const CellBatch& cb, std::span<const int> resolution, int corner);

// Jet-valued per-corner weights from per-dimension local jets (each
// (1,B)). Factors are per-axis; the bit-0 factor is 1 minus the bit-1
// factor, so the 2^d weights sum to 1 exactly up to rounding.
std::vector<Jet> weight_jets(JetOps& jo, std::span<const Jet> local, Weighting w);

}  // namespace pilir
