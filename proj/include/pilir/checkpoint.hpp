// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "pilir/params.hpp"

namespace pilir {

// Binary checkpoint: magic "PILIRCKP", u32 LE format version, u64 LE
// manifest length, manifest JSON, then little-endian IEEE-754 doubles.
// The manifest records name/shape/offset per tensor plus a free-form
// "meta" object, so checkpoints are self-describing.
inline constexpr char kCheckpointMagic[8] = {'P', 'I', 'L', 'I', 'R', 'C', 'K', 'P'};
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const nlohmann::json& meta);

struct LoadedCheckpoint {
  uint32_t version;
  nlohmann::json meta;
  std::vector<ParamEntry> tensors;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

// Copies loaded tensors into a freshly constructed store by name; any
// name or shape mismatch raises with a manifest-vs-store diff.
void restore_params(ParamStore& store, const LoadedCheckpoint& ckpt);

}  // namespace pilir
