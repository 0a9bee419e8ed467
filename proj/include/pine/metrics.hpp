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

#ifndef PINE_METRICS_HPP_
#define PINE_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pine/graph.hpp"

namespace pine {

// Fraction of nodes whose predicted class equals the true class. Both maps
// must cover the same nonempty id set.
double accuracy(const std::map<NodeId, int>& predicted,
                const std::map<NodeId, int>& truth);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

// Per-label F1 averaged without weights (macro) and F1 of the pooled
// counts (micro). A label with no predicted and no true positives scores 0.
F1Scores f1_scores(std::span<const std::vector<std::uint8_t>> predicted,
                   std::span<const std::vector<std::uint8_t>> truth,
                   int num_classes);

}  // namespace pine

#endif  // PINE_METRICS_HPP_
