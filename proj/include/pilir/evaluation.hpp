// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pilir/models.hpp"
#include "pilir/problems.hpp"

namespace pilir {

// Relative L2 error ||u - uhat||_2 / ||u||_2.
double rel_l2(std::span<const double> truth, std::span<const double> pred);

// Tensor-product evaluation grid with ground truth. Periodic dimensions
// exclude the upper endpoint so the samples tile the period uniformly.
struct EvalGrid {
  std::vector<int> sizes;
  std::vector<BoundsDim> bounds;
  std::vector<bool> inclusive;  // per dimension

  int dim() const { return int(sizes.size()); }
  size_t points() const;
  double coord(int d, int i) const;
  // (dim, points) coordinate matrix, last dimension fastest.
  Matrix coords() const;
};

// 256^2 for stationary 2-D problems, 64^3 for 3-D, 512 x 101 for
// time-dependent 1-D problems.
EvalGrid default_eval_grid(const PdeProblem& p);

// Model predictions over a grid, evaluated in fixed-size chunks.
std::vector<double> predict_grid(const Model& model, const ParamStore& store, const EvalGrid& grid,
                                 int chunk = 4096);

// In-place radix-2 decimation-in-time FFT; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

// Magnitude spectrum of a 1-D periodic sample array. Input length is
// resampled (linear interpolation over the period) to the next power of
// two when needed. amplitude[k] = |X_k|/n for k = 0, 2|X_k|/n otherwise.
struct Spectrum {
  std::vector<double> amplitude;  // k = 0 .. n/2
  std::vector<std::pair<int, double>> top(int k) const;
};
Spectrum spectrum(std::span<const double> samples);

// Reference solution table over an EvalGrid for periodic 1-D + time
// problems, via a pseudo-spectral exponential integrator: the linear
// symbol is advanced exactly in Fourier space, the nonlinear term with a
// second-order explicit (RK2) correction.
struct ReferenceTable {
  EvalGrid grid;  // {x, t}
  std::vector<double> values;  // t-major is NOT used; layout matches grid.coords()
};
ReferenceTable reference_solve(const PdeProblem& p, int modes = 512, double dt = 1e-4,
                               int time_slices = 101);

// 16-bit binary portable graymap with linear min-max normalization; a
// constant field renders mid-gray. Also writes the raw grid as CSV when
// csv_path is non-empty.
void render_field(const std::vector<double>& values, int rows, int cols, const std::string& path,
                  const std::string& csv_path = "");

// Field CSV: header, then one row per point (coordinates..., truth, prediction).
void write_field_csv(const EvalGrid& grid, std::span<const double> truth,
                     std::span<const double> pred, const std::string& path);

// Ground truth over a grid from the problem's exact solution or, for
// problems without one, a reference table (nearest-index lookup; the
// table is generated on the same grid).
std::vector<double> ground_truth(const PdeProblem& p, const EvalGrid& grid,
                                 const ReferenceTable* ref);

}  // namespace pilir
