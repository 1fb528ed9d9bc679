// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pilir/matrix.hpp"

namespace pilir {

using ParamId = int32_t;

// One trainable tensor. `shape` is the logical shape written to
// checkpoints; `value` is its 2-D storage layout.
struct ParamEntry {
  std::string name;
  std::vector<int> shape;
  Matrix value;
};

// Owns every trainable tensor of a model. Tapes reference entries by id;
// values are mutated only by the optimizer between passes.
class ParamStore {
 public:
  ParamId add(std::string name, std::vector<int> shape, Matrix value) {
    entries_.push_back({std::move(name), std::move(shape), std::move(value)});
    return ParamId(entries_.size() - 1);
  }

  int count() const { return int(entries_.size()); }
  Matrix& value(ParamId id) { return entries_[id].value; }
  const Matrix& value(ParamId id) const { return entries_[id].value; }
  const ParamEntry& entry(ParamId id) const { return entries_[id]; }
  ParamEntry& entry(ParamId id) { return entries_[id]; }

  ParamId find(const std::string& name) const {
    for (size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].name == name) return ParamId(i);
    return -1;
  }

  size_t total_doubles() const {
    size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

 private:
  std::vector<ParamEntry> entries_;
};

// Gradient accumulator keyed by parameter id. Every registered parameter
// gets a zero-initialized slot, so unreached parameters read as zero.
class GradMap {
 public:
  void init(const ParamStore& store) {
    grads_.clear();
    grads_.reserve(store.count());
    for (ParamId i = 0; i < store.count(); ++i) {
      const Matrix& v = store.value(i);
      grads_.emplace_back(v.rows(), v.cols());
    }
  }

  void zero() {
    for (auto& g : grads_) g.fill(0.0);
  }

  Matrix& grad(ParamId id) { return grads_[id]; }
  const Matrix& grad(ParamId id) const { return grads_[id]; }
  int count() const { return int(grads_.size()); }

  void accumulate(const GradMap& other) {
    for (size_t i = 0; i < grads_.size(); ++i) {
      const auto& src = other.grads_[i].values();
      auto& dst = grads_[i].values();
      for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }

 private:
  std::vector<Matrix> grads_;
};

}  // namespace pilir
