// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pilir/jets.hpp"
#include "pilir/params.hpp"
#include "pilir/rng.hpp"

namespace pilir {

enum class Activation { Tanh, GaussianWavelet, Identity };

Activation activation_from_string(const std::string& s);
std::string activation_to_string(Activation a);

// Fully connected network. Hidden layers use the configured activation;
// the output layer is linear. Weights are Xavier-normal with gain 1
// (std = sqrt(2 / (fan_in + fan_out))), biases start at zero.
// Parameter names follow "{prefix}.{layer}.w" / "{prefix}.{layer}.b".
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& prefix, std::vector<int> sizes, Activation act,
      SplitMix64& rng);

  int in_width() const { return sizes_.front(); }
  int out_width() const { return sizes_.back(); }
  int layers() const { return int(weights_.size()); }
  Activation activation() const { return act_; }
  ParamId weight(int layer) const { return weights_[layer]; }
  ParamId bias(int layer) const { return biases_[layer]; }

  Jet apply(JetOps& jo, const Jet& x) const;

 private:
  std::vector<int> sizes_;
  Activation act_ = Activation::Tanh;
  std::vector<ParamId> weights_;
  std::vector<ParamId> biases_;
};

// sigma(x) = -x * exp(-x^2 / 2)
Jet gaussian_wavelet(JetOps& jo, const Jet& x);

}  // namespace pilir
