// SPDX-License-Identifier: Apache-2.0
#include "pilir/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace pilir {

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "gaussian_wavelet") return Activation::GaussianWavelet;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string activation_to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::GaussianWavelet: return "gaussian_wavelet";
    case Activation::Identity: return "identity";
  }
  return "tanh";
}

Mlp::Mlp(ParamStore& store, const std::string& prefix, std::vector<int> sizes, Activation act,
         SplitMix64& rng)
    : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l], fan_out = sizes_[l + 1];
    const double std = std::sqrt(2.0 / double(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (double& v : w.values()) v = std * rng.normal();
    const std::string layer = prefix + "." + std::to_string(l);
    weights_.push_back(store.add(layer + ".w", {fan_out, fan_in}, std::move(w)));
    biases_.push_back(store.add(layer + ".b", {fan_out}, Matrix(fan_out, 1)));
  }
}

Jet gaussian_wavelet(JetOps& jo, const Jet& x) {
  Jet half_sq = jo.axpy(jo.square(x), -0.5, 0.0);
  return jo.neg(jo.mul(x, jo.exp(half_sq)));
}

Jet Mlp::apply(JetOps& jo, const Jet& x) const {
  if (jo.tape().value(x.v).rows() != in_width())
    throw std::invalid_argument("Mlp: input width mismatch");
  Tape& t = jo.tape();
  Jet h = x;
  for (int l = 0; l < layers(); ++l) {
    h = jo.affine(t.param(weights_[l]), h, t.param(biases_[l]));
    if (l + 1 < layers()) {
      switch (act_) {
        case Activation::Tanh: h = jo.tanh(h); break;
        case Activation::GaussianWavelet: h = gaussian_wavelet(jo, h); break;
        case Activation::Identity: break;
      }
    }
  }
  return h;
}

}  // namespace pilir
