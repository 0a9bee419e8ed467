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

#ifndef PINE_CONFIG_HPP_
#define PINE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pine/graph.hpp"
#include "pine/optim.hpp"
#include "pine/setfn.hpp"

namespace pine {

enum class BatchMode { automatic, full, minibatch };

// Training configuration. Per-type lists (directions, scales, lambda) may
// be given with a single entry, which resolve() broadcasts to every type.
struct TrainConfig {
  int dim = 64;
  int num_hidden = 16;
  std::vector<int> num_directions{32};
  std::vector<int> num_scales{16};
  std::vector<double> lambdas{0.005};
  double lambda_w = 1e-3;
  int epochs = 300;
  BatchMode batch = BatchMode::automatic;
  std::size_t batch_size = 256;
  // Graphs up to this many nodes train full-batch in automatic mode.
  std::size_t full_batch_limit = 20'000;
  std::size_t neighbor_cap = 128;  // 0: unlimited
  std::uint64_t seed = 1;
  AdamHyper adam{};
  Activation activation = Activation::logistic;
  Sharing sharing = Sharing::shared;
  int workers = 1;
  double validation_fraction = 0.1;
  int eval_every = 10;
  double threshold = 0.5;
  double init_scale = 0.0;  // <= 0: 1/sqrt(dim)

  // Defaults for a graph with `num_types` node types and the given head.
  static TrainConfig defaults(int num_types, LabelMode mode);

  // Applies one "key = value" setting; throws on unknown keys or values
  // that do not parse.
  void set(std::string_view key, std::string_view value);

  // Broadcasts single-entry per-type lists and checks every field.
  void resolve(int num_types);
  void validate(int num_types) const;

  PineShape pine_shape(int num_types) const;

  // Canonical key/value listing; set() accepts every pair it produces.
  std::vector<std::pair<std::string, std::string>> items() const;
  std::string to_text() const;
  std::uint64_t hash() const;
};

// Ordered overrides layered over TrainConfig::defaults. Keys and values are
// validated when added.
class ConfigOverrides {
 public:
  void set(std::string_view key, std::string_view value);
  void load_file(const std::filesystem::path& path);
  TrainConfig resolve(int num_types, LabelMode mode) const;
  bool has(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& items() const {
    return items_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

// Formats a double so that parsing it back yields the same value.
std::string format_double(double value);

}  // namespace pine

#endif  // PINE_CONFIG_HPP_
