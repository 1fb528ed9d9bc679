// SPDX-License-Identifier: Apache-2.0
#include "pilir/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pilir/rng.hpp"

namespace pilir {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

NodeId jet_value(JetOps& jo, const Jet& u) { return u.v; }

static NodeId materialize(JetOps& jo, const Jet& u, NodeId n) {
  if (n != kNoNode) return n;
  const Matrix& v = jo.tape().value(u.v);
  return jo.tape().constant(Matrix(v.rows(), v.cols()));
}

NodeId jet_d1(JetOps& jo, const Jet& u, int axis) {
  const int k = jo.spec().index_of(axis);
  if (k < 0) throw std::invalid_argument("jet_d1: axis not in jet spec");
  return materialize(jo, u, u.d1[k]);
}

NodeId jet_d2(JetOps& jo, const Jet& u, int axis) {
  const int k = jo.spec().index_of(axis);
  if (k < 0 || jo.spec().order < 2) throw std::invalid_argument("jet_d2: axis not in jet spec");
  return materialize(jo, u, u.d2[k]);
}

JetSpec interior_jet_spec(const PdeProblem& p) {
  JetSpec s;
  s.order = 1;
  for (const auto& d : p.derivs) {
    if (s.index_of(d.axis) < 0) s.axes.push_back(d.axis);
    s.order = std::max(s.order, d.order);
  }
  return s;
}

JetSpec boundary_jet_spec(const PdeProblem& p) {
  JetSpec s;
  s.order = 1;
  for (const auto& bc : p.periodic)
    for (int o : bc.orders)
      if (o >= 1 && s.index_of(bc.dim) < 0) s.axes.push_back(bc.dim);
  return s;
}

PdeProblem helmholtz(int spatial_dim, std::vector<double> a, double k) {
  if (spatial_dim != 2 && spatial_dim != 3) throw std::invalid_argument("helmholtz: dim 2 or 3");
  if (int(a.size()) != spatial_dim) throw std::invalid_argument("helmholtz: |a| != dim");
  PdeProblem p;
  p.name = (spatial_dim == 2) ? "helmholtz2d" : "helmholtz3d";
  p.dim = spatial_dim;
  p.bounds.assign(spatial_dim, BoundsDim{-1.0, 1.0});
  p.has_time = false;
  for (int ax = 0; ax < spatial_dim; ++ax) p.derivs.push_back({ax, 2});
  for (int i = 0; i < spatial_dim; ++i) p.params["a" + std::to_string(i + 1)] = a[i];
  p.params["k"] = k;

  const double k2 = k * k;
  double a_sq = 0.0;
  for (double ai : a) a_sq += ai * ai;
  const double lap_coeff = kPi * kPi * a_sq;

  auto product_sin = [a, spatial_dim](std::span<const double> x) {
    double u = 1.0;
    for (int i = 0; i < spatial_dim; ++i) u *= std::sin(a[i] * kPi * x[i]);
    return u;
  };

  p.exact = product_sin;
  p.exact_jets = [a, spatial_dim](JetOps& jo, std::span<const Jet> x) {
    Jet u = jo.sin(jo.axpy(x[0], a[0] * kPi, 0.0));
    for (int i = 1; i < spatial_dim; ++i) u = jo.mul(u, jo.sin(jo.axpy(x[i], a[i] * kPi, 0.0)));
    return u;
  };

  p.residual = [k2, lap_coeff, product_sin, spatial_dim](JetOps& jo, const Jet& u,
                                                         const Matrix& coords) {
    Tape& t = jo.tape();
    NodeId lap = jet_d2(jo, u, 0);
    for (int ax = 1; ax < spatial_dim; ++ax) lap = t.add(lap, jet_d2(jo, u, ax));
    const int b = coords.cols();
    Matrix q(1, b);
    std::vector<double> x(spatial_dim);
    for (int j = 0; j < b; ++j) {
      for (int i = 0; i < spatial_dim; ++i) x[i] = coords(i, j);
      const double su = product_sin(x);
      q(0, j) = k2 * su - lap_coeff * su;
    }
    return t.sub(t.add(lap, t.scale(u.v, k2)), t.constant(std::move(q)));
  };

  p.dirichlet = DirichletBc{[](std::span<const double>) { return 0.0; }};
  return p;
}

PdeProblem convection(double beta, const std::string& ic_kind) {
  PdeProblem p;
  p.name = (ic_kind == "multiscale") ? "ms_convection" : "convection";
  p.dim = 2;
  p.bounds = {BoundsDim{0.0, kTwoPi}, BoundsDim{0.0, 1.0}};
  p.has_time = true;
  p.derivs = {{0, 1}, {1, 1}};
  p.params["beta"] = beta;

  struct Mode {
    double amp, freq;
  };
  std::vector<Mode> modes;
  if (ic_kind == "single_sine") {
    modes = {{1.0, 1.0}};
  } else if (ic_kind == "multiscale") {
    modes = {{1.0, 1.0}, {0.5, 4.0}, {0.1, 8.0}, {0.1, 16.0}};
  } else {
    throw std::invalid_argument("convection: unknown ic kind " + ic_kind);
  }

  auto u0 = [modes](double x) {
    double u = 0.0;
    for (const auto& m : modes) u += m.amp * std::sin(m.freq * x);
    return u;
  };

  p.ic = [u0](std::span<const double> xs) { return u0(xs[0]); };
  p.exact = [u0, beta](std::span<const double> xt) { return u0(xt[0] - beta * xt[1]); };
  p.exact_jets = [modes, beta](JetOps& jo, std::span<const Jet> x) {
    // u0 is a sine series, so the shifted argument needs no wrapping.
    Jet phase = jo.sub(x[0], jo.axpy(x[1], beta, 0.0));
    Jet u;
    bool first = true;
    for (const auto& m : modes) {
      Jet term = jo.axpy(jo.sin(jo.axpy(phase, m.freq, 0.0)), m.amp, 0.0);
      u = first ? term : jo.add(u, term);
      first = false;
    }
    return u;
  };

  p.residual = [beta](JetOps& jo, const Jet& u, const Matrix&) {
    Tape& t = jo.tape();
    return t.add(jet_d1(jo, u, 1), t.scale(jet_d1(jo, u, 0), beta));
  };

  p.periodic = {PeriodicBc{0, {0}}};
  p.spectral = SpectralForm{
      [beta](double k) { return std::complex<double>(0.0, -beta * k); },
      nullptr,
  };
  return p;
}

PdeProblem allen_cahn(double nu, double lambda) {
  PdeProblem p;
  p.name = "allen_cahn";
  p.dim = 2;
  p.bounds = {BoundsDim{-1.0, 1.0}, BoundsDim{0.0, 1.0}};
  p.has_time = true;
  p.derivs = {{0, 2}, {1, 1}};
  p.params["nu"] = nu;
  p.params["lambda"] = lambda;

  p.ic = [](std::span<const double> xs) { return xs[0] * xs[0] * std::cos(kPi * xs[0]); };

  p.residual = [nu, lambda](JetOps& jo, const Jet& u, const Matrix&) {
    Tape& t = jo.tape();
    NodeId cubic = t.mul(t.square(u.v), u.v);
    NodeId r = t.sub(jet_d1(jo, u, 1), t.scale(jet_d2(jo, u, 0), nu));
    r = t.add(r, t.scale(cubic, lambda));
    return t.sub(r, t.scale(u.v, lambda));
  };

  p.periodic = {PeriodicBc{0, {0, 1}}};
  p.spectral = SpectralForm{
      [nu, lambda](double k) { return std::complex<double>(-nu * k * k + lambda, 0.0); },
      [lambda](double u) { return -lambda * u * u * u; },
  };
  return p;
}

PdeProblem reaction_diffusion(double nu, double rho) {
  PdeProblem p;
  p.name = "reaction_diffusion";
  p.dim = 2;
  p.bounds = {BoundsDim{0.0, kTwoPi}, BoundsDim{0.0, 1.0}};
  p.has_time = true;
  p.derivs = {{0, 2}, {1, 1}};
  p.params["nu"] = nu;
  p.params["rho"] = rho;

  p.ic = [](std::span<const double> xs) {
    const double z = 4.0 * (xs[0] - kPi) / kPi;
    return std::exp(-0.5 * z * z);
  };

  p.residual = [nu, rho](JetOps& jo, const Jet& u, const Matrix&) {
    Tape& t = jo.tape();
    // u_t - nu u_xx - rho u (1 - u) = u_t - nu u_xx - rho u + rho u^2
    NodeId r = t.sub(jet_d1(jo, u, 1), t.scale(jet_d2(jo, u, 0), nu));
    r = t.sub(r, t.scale(u.v, rho));
    return t.add(r, t.scale(t.square(u.v), rho));
  };

  p.periodic = {PeriodicBc{0, {0}}};
  p.spectral = SpectralForm{
      [nu, rho](double k) { return std::complex<double>(-nu * k * k + rho, 0.0); },
      [rho](double u) { return -rho * u * u; },
  };
  return p;
}

PdeProblem make_problem(const std::string& name, const std::map<std::string, double>& ov) {
  auto get = [&ov](const std::string& key, double dflt) {
    auto it = ov.find(key);
    return it == ov.end() ? dflt : it->second;
  };
  for (const auto& [key, _] : ov) {
    static const std::vector<std::string> known = {"a1", "a2", "a3", "k",      "beta",
                                                   "nu", "rho", "lambda"};
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw std::invalid_argument("unknown problem parameter: " + key);
  }
  if (name == "helmholtz2d") return helmholtz(2, {get("a1", 10), get("a2", 10)}, get("k", 1));
  if (name == "helmholtz3d")
    return helmholtz(3, {get("a1", 10), get("a2", 10), get("a3", 10)}, get("k", 1));
  if (name == "convection") return convection(get("beta", 30), "single_sine");
  if (name == "ms_convection") return convection(get("beta", 30), "multiscale");
  if (name == "allen_cahn") return allen_cahn(get("nu", 1e-4), get("lambda", 5));
  if (name == "reaction_diffusion") return reaction_diffusion(get("nu", 0.5), get("rho", 5));
  throw std::invalid_argument("unknown problem: " + name);
}

double max_exact_residual(const PdeProblem& p, int n_points, uint64_t seed) {
  if (!p.exact_jets) throw std::invalid_argument("max_exact_residual: no closed form");
  SplitMix64 rng(seed);
  Matrix coords(p.dim, n_points);
  for (int j = 0; j < n_points; ++j)
    for (int d = 0; d < p.dim; ++d) coords(d, j) = rng.uniform(p.bounds[d].lo, p.bounds[d].hi);

  Tape tape;
  JetOps jo(tape, interior_jet_spec(p));
  std::vector<Jet> xs(p.dim);
  for (int d = 0; d < p.dim; ++d) {
    Matrix row(1, n_points);
    for (int j = 0; j < n_points; ++j) row(0, j) = coords(d, j);
    xs[d] = jo.coordinate(row, d);
  }
  Jet u = p.exact_jets(jo, xs);
  NodeId r = p.residual(jo, u, coords);
  const Matrix& rv = tape.value(r);
  double mx = 0.0;
  for (double v : rv.values()) mx = std::max(mx, std::abs(v));
  return mx;
}

}  // namespace pilir
