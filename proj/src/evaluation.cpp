// SPDX-License-Identifier: Apache-2.0
#include "pilir/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "pilir/textio.hpp"

namespace pilir {

double rel_l2(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) throw std::invalid_argument("rel_l2: length mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - pred[i];
    num += e * e;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw std::domain_error("rel_l2: zero-norm truth");
  return std::sqrt(num / den);
}

size_t EvalGrid::points() const {
  size_t n = 1;
  for (int s : sizes) n *= size_t(s);
  return n;
}

double EvalGrid::coord(int d, int i) const {
  const auto [lo, hi] = bounds[d];
  const int n = sizes[d];
  if (inclusive[d]) return (n == 1) ? lo : lo + (hi - lo) * double(i) / double(n - 1);
  return lo + (hi - lo) * double(i) / double(n);
}

Matrix EvalGrid::coords() const {
  const size_t npts = points();
  const int d = dim();
  Matrix out(d, int(npts));
  std::vector<int> idx(d, 0);
  for (size_t j = 0; j < npts; ++j) {
    for (int k = 0; k < d; ++k) out(k, int(j)) = coord(k, idx[k]);
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

EvalGrid default_eval_grid(const PdeProblem& p) {
  EvalGrid g;
  g.bounds = p.bounds;
  if (p.has_time) {
    g.sizes = {512, 101};
    bool x_periodic = false;
    for (const auto& bc : p.periodic) x_periodic = x_periodic || bc.dim == 0;
    g.inclusive = {!x_periodic, true};
  } else if (p.dim == 2) {
    g.sizes = {256, 256};
    g.inclusive = {true, true};
  } else {
    g.sizes = {64, 64, 64};
    g.inclusive = {true, true, true};
  }
  return g;
}

std::vector<double> predict_grid(const Model& model, const ParamStore& store, const EvalGrid& grid,
                                 int chunk) {
  const Matrix all = grid.coords();
  const int n = all.cols();
  const int d = all.rows();
  std::vector<double> out(size_t(n) * model.d_out());
  Matrix pred;
  for (int at = 0; at < n; at += chunk) {
    const int b = std::min(chunk, n - at);
    Matrix part(d, b);
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < b; ++j) part(k, j) = all(k, at + j);
    model.predict(store, part, pred);
    for (int r = 0; r < pred.rows(); ++r)
      for (int j = 0; j < b; ++j) out[size_t(r) * n + at + j] = pred(r, j);
  }
  return out;
}

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
  const size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_radix2: length not 2^k");
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / double(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = data[i + j];
        const std::complex<double> v = data[i + j + len / 2] * w;
        data[i + j] = u + v;
        data[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& c : data) c /= double(n);
}

Spectrum spectrum(std::span<const double> samples) {
  size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("spectrum: need at least 2 samples");
  std::vector<double> s(samples.begin(), samples.end());
  if ((n & (n - 1)) != 0) {
    // periodic linear resample to the next power of two
    size_t m = 1;
    while (m < n) m <<= 1;
    std::vector<double> r(m);
    for (size_t i = 0; i < m; ++i) {
      const double pos = double(i) * double(n) / double(m);
      const size_t lo = size_t(pos);
      const double t = pos - double(lo);
      r[i] = (1.0 - t) * s[lo % n] + t * s[(lo + 1) % n];
    }
    s = std::move(r);
    n = m;
  }
  std::vector<std::complex<double>> f(n);
  for (size_t i = 0; i < n; ++i) f[i] = s[i];
  fft_radix2(f, false);
  Spectrum sp;
  sp.amplitude.resize(n / 2 + 1);
  for (size_t k = 0; k <= n / 2; ++k) {
    const double mag = std::abs(f[k]) / double(n);
    sp.amplitude[k] = (k == 0) ? mag : 2.0 * mag;
  }
  return sp;
}

std::vector<std::pair<int, double>> Spectrum::top(int k) const {
  std::vector<std::pair<int, double>> all;
  all.reserve(amplitude.size());
  for (size_t i = 0; i < amplitude.size(); ++i) all.emplace_back(int(i), amplitude[i]);
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  all.resize(std::min<size_t>(k, all.size()));
  return all;
}

namespace {

std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 0.5) {
    // (e^z - 1)/z by series; terms to machine precision at |z| < 0.5
    std::complex<double> sum(1.0, 0.0), term(1.0, 0.0);
    for (int j = 2; j <= 18; ++j) {
      term *= z / double(j);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

std::complex<double> phi2(std::complex<double> z) {
  if (std::abs(z) < 0.5) {
    // (e^z - 1 - z)/z^2 by series
    std::complex<double> sum(0.5, 0.0), term(0.5, 0.0);
    for (int j = 3; j <= 19; ++j) {
      term *= z / double(j);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

}  // namespace

ReferenceTable reference_solve(const PdeProblem& p, int modes, double dt, int time_slices) {
  if (!p.spectral) throw std::invalid_argument("reference_solve: problem has no spectral form");
  if (!p.has_time || p.dim != 2)
    throw std::invalid_argument("reference_solve: needs a periodic 1-D + time problem");
  if ((modes & (modes - 1)) != 0) throw std::invalid_argument("reference_solve: modes not 2^k");

  const double lo = p.bounds[0].lo, hi = p.bounds[0].hi;
  const double length = hi - lo;
  const double t_end = p.bounds[1].hi;
  const double snap_dt = t_end / double(time_slices - 1);
  const int steps_per_snap = int(std::lround(snap_dt / dt));
  if (steps_per_snap < 1 || std::abs(snap_dt - steps_per_snap * dt) > 1e-9 * snap_dt)
    throw std::invalid_argument("reference_solve: dt must divide the snapshot interval");

  const int n = modes;
  std::vector<std::complex<double>> uhat(n);
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) {
    x[j] = lo + length * double(j) / double(n);
    const double xv = x[j];
    uhat[j] = p.ic ? p.ic(std::span<const double>(&xv, 1)) : 0.0;
  }
  fft_radix2(uhat, false);

  std::vector<std::complex<double>> e_h(n), h_phi1(n), h_phi2(n);
  for (int j = 0; j < n; ++j) {
    const int m = (j <= n / 2) ? j : j - n;
    const double k = 2.0 * std::numbers::pi * double(m) / length;
    const std::complex<double> z = p.spectral->linear(k) * dt;
    e_h[j] = std::exp(z);
    h_phi1[j] = dt * phi1(z);
    h_phi2[j] = dt * phi2(z);
  }

  ReferenceTable table;
  table.grid.sizes = {n, time_slices};
  table.grid.bounds = p.bounds;
  table.grid.inclusive = {false, true};
  table.values.assign(size_t(n) * time_slices, 0.0);

  const bool has_nl = bool(p.spectral->nonlinear);
  std::vector<std::complex<double>> nl(n), nl2(n), a(n), tmp(n);

  auto record = [&](int slice) {
    tmp = uhat;
    fft_radix2(tmp, true);
    for (int j = 0; j < n; ++j) table.values[size_t(j) * time_slices + slice] = tmp[j].real();
  };
  auto eval_nl = [&](const std::vector<std::complex<double>>& spec,
                     std::vector<std::complex<double>>& out) {
    out = spec;
    fft_radix2(out, true);
    for (int j = 0; j < n; ++j) out[j] = p.spectral->nonlinear(out[j].real());
    fft_radix2(out, false);
  };

  record(0);
  for (int s = 1; s < time_slices; ++s) {
    for (int step = 0; step < steps_per_snap; ++step) {
      if (has_nl) {
        eval_nl(uhat, nl);
        for (int j = 0; j < n; ++j) a[j] = e_h[j] * uhat[j] + h_phi1[j] * nl[j];
        eval_nl(a, nl2);
        for (int j = 0; j < n; ++j) uhat[j] = a[j] + h_phi2[j] * (nl2[j] - nl[j]);
      } else {
        for (int j = 0; j < n; ++j) uhat[j] = e_h[j] * uhat[j];
      }
    }
    for (const auto& c : uhat)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::runtime_error("reference_solve: instability detected, try a smaller dt");
    record(s);
  }
  return table;
}

void render_field(const std::vector<double>& values, int rows, int cols, const std::string& path,
                  const std::string& csv_path) {
  if (int(values.size()) != rows * cols) throw std::invalid_argument("render_field: size mismatch");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("render_field: non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("render_field: cannot open " + path);
  f << "P5\n" << cols << " " << rows << "\n65535\n";
  for (int i = 0; i < rows * cols; ++i) {
    uint16_t g = 32768;  // constant field renders mid-gray
    if (hi > lo) g = uint16_t(std::lround((values[i] - lo) / (hi - lo) * 65535.0));
    const unsigned char bytes[2] = {(unsigned char)(g >> 8), (unsigned char)(g & 0xFF)};
    f.write(reinterpret_cast<const char*>(bytes), 2);
  }
  if (!csv_path.empty()) {
    std::ofstream c(csv_path);
    c << "row,col,value\n";
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        c << i << "," << j << "," << fmt_double(values[size_t(i) * cols + j]) << "\n";
  }
}

void write_field_csv(const EvalGrid& grid, std::span<const double> truth,
                     std::span<const double> pred, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_field_csv: cannot open " + path);
  for (int d = 0; d < grid.dim(); ++d) f << "x" << d << ",";
  f << "truth,prediction\n";
  const size_t n = grid.points();
  std::vector<int> idx(grid.dim(), 0);
  for (size_t j = 0; j < n; ++j) {
    for (int d = 0; d < grid.dim(); ++d) f << fmt_double(grid.coord(d, idx[d])) << ",";
    f << fmt_double(truth[j]) << "," << fmt_double(pred[j]) << "\n";
    for (int d = grid.dim() - 1; d >= 0; --d) {
      if (++idx[d] < grid.sizes[d]) break;
      idx[d] = 0;
    }
  }
}

std::vector<double> ground_truth(const PdeProblem& p, const EvalGrid& grid,
                                 const ReferenceTable* ref) {
  const size_t n = grid.points();
  std::vector<double> out(n);
  if (p.exact) {
    std::vector<int> idx(grid.dim(), 0);
    std::vector<double> x(grid.dim());
    for (size_t j = 0; j < n; ++j) {
      for (int d = 0; d < grid.dim(); ++d) x[d] = grid.coord(d, idx[d]);
      out[j] = p.exact(x);
      for (int d = grid.dim() - 1; d >= 0; --d) {
        if (++idx[d] < grid.sizes[d]) break;
        idx[d] = 0;
      }
    }
    return out;
  }
  if (!ref) throw std::invalid_argument("ground_truth: problem needs a reference table");
  if (ref->grid.sizes != grid.sizes)
    throw std::invalid_argument("ground_truth: reference grid mismatch");
  return ref->values;
}

}  // namespace pilir
