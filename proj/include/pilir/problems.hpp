// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilir/grid.hpp"
#include "pilir/jets.hpp"

namespace pilir {

// Materialized derivative components (zero constants where the jet is
// known to vanish).
NodeId jet_value(JetOps& jo, const Jet& u);
NodeId jet_d1(JetOps& jo, const Jet& u, int axis);
NodeId jet_d2(JetOps& jo, const Jet& u, int axis);

struct DerivReq {
  int axis;
  int order;
};

// Residual operator: builds a (1,B) node from the field jet at the given
// physical coordinates (source terms use the plain coordinate values).
using ResidualFn = std::function<NodeId(JetOps&, const Jet& u, const Matrix& coords)>;

// Closed-form field as plain doubles and as a jet expression (the latter
// drives residual validation through the same operators as the model).
using ExactFn = std::function<double(std::span<const double>)>;
using ExactJetFn = std::function<Jet(JetOps&, std::span<const Jet>)>;

struct DirichletBc {
  std::function<double(std::span<const double>)> target;
};

struct PeriodicBc {
  int dim;
  std::vector<int> orders;  // 0: value pairs, 1: first-derivative pairs
};

// Fourier-space form u_t = L(k) u + N(u) on a periodic interval, used by
// the reference solver.
struct SpectralForm {
  std::function<std::complex<double>(double k)> linear;
  std::function<double(double)> nonlinear;
};

struct PdeProblem {
  std::string name;
  int dim = 2;
  std::vector<BoundsDim> bounds;
  int d_out = 1;
  bool has_time = false;  // time is always the last dimension

  std::vector<DerivReq> derivs;
  ResidualFn residual;

  ExactFn exact;          // null when no closed form
  ExactJetFn exact_jets;  // null when no closed form

  std::optional<DirichletBc> dirichlet;
  std::vector<PeriodicBc> periodic;
  std::function<double(std::span<const double>)> ic;  // over spatial coords

  std::map<std::string, double> params;
  std::optional<SpectralForm> spectral;

  int time_axis() const { return dim - 1; }
  bool has_exact() const { return bool(exact); }
};

// Jet spec covering every derivative the residual needs.
JetSpec interior_jet_spec(const PdeProblem& p);
// Jet spec for boundary terms (first order on periodic dims when an
// order-1 pair is declared, empty otherwise).
JetSpec boundary_jet_spec(const PdeProblem& p);

PdeProblem helmholtz(int spatial_dim, std::vector<double> a, double k);
PdeProblem convection(double beta, const std::string& ic_kind);  // single_sine | multiscale
PdeProblem allen_cahn(double nu = 1e-4, double lambda = 5.0);
PdeProblem reaction_diffusion(double nu = 0.5, double rho = 5.0);

// By CLI name: helmholtz2d, helmholtz3d, convection, ms_convection,
// allen_cahn, reaction_diffusion. Overrides may adjust named constants
// (a1, a2, a3, k, beta, nu, lambda, rho).
PdeProblem make_problem(const std::string& name, const std::map<std::string, double>& overrides);

// Max |residual| of the exact solution over n random interior points.
double max_exact_residual(const PdeProblem& p, int n_points, uint64_t seed);

}  // namespace pilir
