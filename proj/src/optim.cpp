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

#include "pine/optim.hpp"

#include <cmath>
#include <string>

#include "pine/error.hpp"

namespace pine {

void AdamState::reset(std::span<const Tensor* const> params) {
  step = 0;
  first.clear();
  second.clear();
  for (const Tensor* p : params) {
    first.push_back(p->zeros_like());
    second.push_back(p->zeros_like());
    first.back().name = "adam.first." + p->name;
    second.back().name = "adam.second." + p->name;
  }
}

void adam_step(AdamState& adam, std::span<Tensor* const> params,
               std::span<const Tensor* const> grads) {
  if (params.size() != grads.size() || params.size() != adam.first.size())
    fail(ErrorCode::invalid_argument, "optimizer tensor count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]) ||
        !params[i]->same_shape(adam.first[i]) ||
        params[i]->size() != grads[i]->size())
      fail(ErrorCode::invalid_argument,
           "gradient shape mismatch for " + params[i]->name);
    if (!grads[i]->all_finite())
      fail(ErrorCode::numeric,
           "non-finite gradient in " + params[i]->name + "; step aborted");
  }

  const AdamHyper& h = adam.hyper;
  const std::uint64_t t = ++adam.step;
  const double td = static_cast<double>(t);
  const double lr = h.learning_rate / (1.0 + h.decay * (td - 1.0));
  const double first_correction = 1.0 - std::pow(h.beta1, td);
  const double second_correction = 1.0 - std::pow(h.beta2, td);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* theta = params[i]->data.data();
    const double* g = grads[i]->data.data();
    double* m = adam.first[i].data.data();
    double* v = adam.second[i].data.data();
    for (std::size_t j = 0; j < params[i]->size(); ++j) {
      m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g[j];
      v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g[j] * g[j];
      const double m_hat = m[j] / first_correction;
      const double v_hat = v[j] / second_correction;
      theta[j] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

}  // namespace pine
