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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "pine/error.hpp"
#include "pine/optim.hpp"

using namespace pine;

namespace {

struct Scalars {
  std::vector<Tensor> params, grads;
  AdamState adam;

  explicit Scalars(std::size_t n, AdamHyper hyper = {}) {
    params.emplace_back("theta", std::vector<std::size_t>{n});
    grads.emplace_back("theta", std::vector<std::size_t>{n});
    adam.hyper = hyper;
    const Tensor* view[] = {&params[0]};
    adam.reset(view);
  }
  void step() {
    Tensor* p[] = {&params[0]};
    const Tensor* g[] = {&grads[0]};
    adam_step(adam, p, g);
  }
};

}  // namespace

TEST(Adam, ZeroGradientLeavesParameters) {
  Scalars s(3);
  s.params[0].data = {1.0, -2.0, 3.0};
  s.step();
  EXPECT_EQ(s.params[0].data, (std::vector<double>{1.0, -2.0, 3.0}));
  EXPECT_EQ(s.adam.step, 1u);
}

TEST(Adam, FirstStepHandEvaluation) {
  // m = 0.1, v = 0.001; bias correction gives m_hat = v_hat = 1, so
  // theta = -lr * 1 / (sqrt(1) + eps) = -1e-3 / (1 + 1e-8).
  Scalars s(1);
  s.grads[0][0] = 1.0;
  s.step();
  EXPECT_NEAR(s.params[0][0], -1e-3 / (1.0 + 1e-8), 1e-18);
  EXPECT_NEAR(s.params[0][0], -0.00099999999, 1e-15);
  EXPECT_DOUBLE_EQ(s.adam.first[0][0], 0.1);
  EXPECT_NEAR(s.adam.second[0][0], 0.001, 1e-18);
}

TEST(Adam, SecondStepWithConstantGradientIsLearningRate) {
  Scalars s(1);
  s.grads[0][0] = 1.0;
  s.step();
  const double after_one = s.params[0][0];
  s.step();
  EXPECT_NEAR(after_one - s.params[0][0], 1e-3, 1e-10);
  EXPECT_EQ(s.adam.step, 2u);
}

TEST(Adam, UpdateBoundAndSign) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0.0, 1.0);
  Scalars s(20);
  const double bound = s.adam.hyper.learning_rate / (1.0 - s.adam.hyper.beta1);
  for (int t = 0; t < 300; ++t) {
    for (double& g : s.grads[0].data) g = noise(gen) * std::exp(noise(gen) * 3);
    const auto before = s.params[0].data;
    s.step();
    for (std::size_t i = 0; i < before.size(); ++i) {
      const double delta = s.params[0][i] - before[i];
      EXPECT_LE(std::abs(delta), bound);
      if (s.adam.first[0][i] != 0.0) {
        EXPECT_LT(delta * s.adam.first[0][i], 0.0);
      }
      EXPECT_GE(s.adam.second[0][i], 0.0);
    }
  }
}

TEST(Adam, Deterministic) {
  Scalars a(4), b(4);
  for (int t = 0; t < 10; ++t) {
    for (std::size_t i = 0; i < 4; ++i) a.grads[0][i] = b.grads[0][i] = std::sin(t * 4.0 + i);
    a.step();
    b.step();
  }
  EXPECT_EQ(a.params[0].data, b.params[0].data);
}

TEST(Adam, DecayHook) {
  AdamHyper hyper;
  hyper.decay = 1.0;
  Scalars s(1, hyper);
  s.grads[0][0] = 1.0;
  s.step();
  const double first = -s.params[0][0];
  s.step();
  const double second = -s.params[0][0] - first;
  EXPECT_NEAR(second, first / 2, 1e-9);
}

TEST(Adam, NonFiniteGradientAbortsStep) {
  Scalars s(2);
  s.params[0].data = {1.0, 1.0};
  s.grads[0].data = {1.0, std::numeric_limits<double>::infinity()};
  try {
    s.step();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::numeric);
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
  }
  EXPECT_EQ(s.params[0].data, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(s.adam.step, 0u);
  EXPECT_EQ(s.adam.first[0][0], 0.0);
}

TEST(Adam, ShapeMismatch) {
  Scalars s(2);
  Tensor wrong("theta", {3});
  Tensor* p[] = {&s.params[0]};
  const Tensor* g[] = {&wrong};
  EXPECT_THROW(adam_step(s.adam, p, g), Error);
}
