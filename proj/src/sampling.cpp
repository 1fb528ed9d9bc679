// SPDX-License-Identifier: Apache-2.0
#include "pilir/sampling.hpp"

#include <stdexcept>

#include "pilir/rng.hpp"

namespace pilir {

PointSets sample(const PdeProblem& p, const SampleCounts& counts, uint64_t seed) {
  PointSets ps;
  const int d = p.dim;

  {
    SplitMix64 rng(SplitMix64::substream(seed, 0x696e74));  // interior stream
    ps.interior = Matrix(d, counts.interior);
    for (int j = 0; j < counts.interior; ++j)
      for (int k = 0; k < d; ++k) ps.interior(k, j) = rng.uniform(p.bounds[k].lo, p.bounds[k].hi);
  }

  if (p.has_time && counts.initial > 0) {
    if (!p.ic) throw std::invalid_argument("sample: problem has no initial condition");
    SplitMix64 rng(SplitMix64::substream(seed, 0x6963));  // ic stream
    const int n = counts.initial;
    ps.initial = Matrix(d, n);
    ps.initial_targets = Matrix(1, n);
    std::vector<double> xs(d - 1);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < d - 1; ++k) {
        xs[k] = rng.uniform(p.bounds[k].lo, p.bounds[k].hi);
        ps.initial(k, j) = xs[k];
      }
      ps.initial(d - 1, j) = 0.0;
      ps.initial_targets(0, j) = p.ic(xs);
    }
  }

  if (counts.boundary > 0) {
    SplitMix64 rng(SplitMix64::substream(seed, 0x6263));  // bc stream
    if (p.dirichlet) {
      const int n = counts.boundary;
      ps.dirichlet = Matrix(d, n);
      ps.dirichlet_targets = Matrix(1, n);
      std::vector<double> x(d);
      for (int j = 0; j < n; ++j) {
        // Uniform over the faces: pick a face (dim, side), uniform on it.
        const int face = int(rng.uniform() * double(2 * d));
        const int fd = face / 2;
        const int side = face % 2;
        for (int k = 0; k < d; ++k)
          x[k] = (k == fd) ? (side ? p.bounds[k].hi : p.bounds[k].lo)
                           : rng.uniform(p.bounds[k].lo, p.bounds[k].hi);
        for (int k = 0; k < d; ++k) ps.dirichlet(k, j) = x[k];
        ps.dirichlet_targets(0, j) = p.dirichlet->target(x);
      }
    }
    for (const auto& bc : p.periodic) {
      PeriodicPairs pp;
      pp.dim = bc.dim;
      pp.orders = bc.orders;
      const int n = counts.boundary;
      pp.a = Matrix(d, n);
      pp.b = Matrix(d, n);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < d; ++k) {
          if (k == bc.dim) {
            pp.a(k, j) = p.bounds[k].lo;
            pp.b(k, j) = p.bounds[k].hi;
          } else {
            const double v = rng.uniform(p.bounds[k].lo, p.bounds[k].hi);
            pp.a(k, j) = v;
            pp.b(k, j) = v;
          }
        }
      }
      ps.periodic.push_back(std::move(pp));
    }
  }
  return ps;
}

}  // namespace pilir
