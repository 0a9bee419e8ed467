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

#ifndef PINE_OPTIM_HPP_
#define PINE_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pine/tensor.hpp"

namespace pine {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Step size at step t is learning_rate / (1 + decay * (t - 1)); 0 keeps it
  // constant.
  double decay = 0.0;
};

// One state over every optimized tensor; moments are stored in the same
// order and shapes as the parameter list given to reset().
struct AdamState {
  AdamHyper hyper;
  std::uint64_t step = 0;
  std::vector<Tensor> first;
  std::vector<Tensor> second;

  void reset(std::span<const Tensor* const> params);
};

// m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
// with m_hat = m / (1 - b1^t), v_hat = v / (1 - b2^t). Nothing is modified
// when any gradient entry is non-finite; the error names the tensor.
void adam_step(AdamState& adam, std::span<Tensor* const> params,
               std::span<const Tensor* const> grads);

}  // namespace pine

#endif  // PINE_OPTIM_HPP_
