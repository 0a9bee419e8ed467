// Copyright 2026 The PINE Embed Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PINE_CHECKPOINT_HPP_
#define PINE_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "pine/model.hpp"
#include "pine/optim.hpp"

namespace pine {

// Binary, little-endian:
//   "PINECKPT" | u32 version
//   u32 n_meta   { u32 len, key bytes, u32 len, value bytes } * n_meta
//   u32 n_tensor { u32 len, name, u32 rank, u64 dims[rank], f64 data[] }
// Metadata records the network shape and optimizer settings; tensors are the
// model state followed by the ADAM moments when present.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> meta;
  ModelState state;
  std::optional<AdamState> adam;
};

void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const AdamState* adam,
                     const std::map<std::string, std::string>& extra_meta = {});

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pine

#endif  // PINE_CHECKPOINT_HPP_
