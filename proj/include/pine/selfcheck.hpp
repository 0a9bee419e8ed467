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

#ifndef PINE_SELFCHECK_HPP_
#define PINE_SELFCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pine/setfn.hpp"

namespace pine {

struct CheckOptions {
  int trials = 1000;  // invariance trials; gradient and oracle use 1/5, 1/10
  std::uint64_t seed = 7;
  // Negative control: weights bundle columns by position before evaluation,
  // which breaks within-type symmetry.
  bool corrupt_symmetry = false;
};

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
  std::string replay;  // JSON of the first failing instance, empty on success
};

// Randomized verification of the aggregation network: permutation
// invariance, analytic vs central-difference gradients, agreement with the
// symmetrization oracle, and the smooth-max construction.
std::vector<CheckLine> run_self_checks(const CheckOptions& options);

// Random parameters and bundle for property checks.
struct RandomInstance {
  PineParams params;
  NeighborBundle bundle;
};

struct InstanceLimits {
  int max_types = 3;
  int max_dim = 4;
  int max_width = 4;      // bound on L, T_k, Q_k
  int max_neighbors = 6;  // bound on N_k (lower bound 0)
};

RandomInstance random_instance(std::uint64_t seed, const InstanceLimits& limits);

std::string instance_json(const RandomInstance& instance);

}  // namespace pine

#endif  // PINE_SELFCHECK_HPP_
