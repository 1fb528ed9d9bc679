// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pilir/problems.hpp"

namespace pilir {

struct SampleCounts {
  int interior = 10000;
  int initial = 1000;
  int boundary = 1000;
};

// Collocation, initial and boundary point sets for one problem. Periodic
// pairs share the non-periodic coordinates and differ by the full period
// in the periodic dimension.
struct PeriodicPairs {
  int dim = 0;
  std::vector<int> orders;
  Matrix a;  // (d, N) at the low face
  Matrix b;  // (d, N) at the high face
};

struct PointSets {
  Matrix interior;         // (d, N_r)
  Matrix initial;          // (d, N_ic), time row exactly 0
  Matrix initial_targets;  // (1, N_ic)
  Matrix dirichlet;        // (d, N_bc) on the boundary
  Matrix dirichlet_targets;
  std::vector<PeriodicPairs> periodic;
};

// Uniform i.i.d. points per region from SplitMix64 substreams of `seed`
// (interior, initial and boundary draw from independent streams, so the
// sets are individually reproducible).
PointSets sample(const PdeProblem& p, const SampleCounts& counts, uint64_t seed);

}  // namespace pilir
