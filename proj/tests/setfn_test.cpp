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
#include "oracle.hpp"
#include "pine/error.hpp"
#include "pine/setfn.hpp"

using namespace pine;

namespace {

// K=1, L=T=Q=1, d=1 with u=0, v=0, w=1, b=0, c=1.
PineParams unit_network(Activation act = Activation::logistic) {
  PineShape s{1, 1, 1, {1}, {1}, act, Sharing::shared};
  PineParams p = PineParams::zeros(s);
  p.directions[0][0] = 1.0;
  p.mixing[0][0] = 1.0;
  p.readout[0] = 1.0;
  return p;
}

NeighborBundle scalar_bundle(std::vector<std::vector<double>> groups) {
  NeighborBundle b;
  for (const auto& g : groups) {
    Columns X(1, g.size());
    X.data = g;
    b.groups.push_back(X);
  }
  return b;
}

}  // namespace

TEST(GEval, ZeroScaleAndOffsetGiveHalf) {
  PineShape s{1, 3, 2, {2}, {3}, Activation::logistic, Sharing::shared};
  PineParams p = init_params(s, 1);
  std::fill(p.scales[0].data.begin(), p.scales[0].data.end(), 0.0);
  std::fill(p.offsets[0].data.begin(), p.offsets[0].data.end(), 0.0);
  for (double e : g_eval(p, 0, std::vector<double>{0.3, -2.0, 7.0})) EXPECT_DOUBLE_EQ(e, 0.5);
}

TEST(GEval, HandEvaluatedLogistic) {
  PineParams p = unit_network();
  p.directions[0][0] = 2.0;
  p.scales[0][0] = 1.0;
  const auto out = g_eval(p, 0, std::vector<double>{1.0});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0], 0.880797, 1e-6);
}

TEST(GEval, ZeroInputDependsOnlyOnOffsets) {
  PineShape s{1, 2, 2, {3}, {2}, Activation::logistic, Sharing::shared};
  const PineParams p = init_params(s, 4);
  const auto out = g_eval(p, 0, std::vector<double>{0.0, 0.0});
  for (int t = 0; t < 3; ++t)
    for (int q = 0; q < 2; ++q) EXPECT_DOUBLE_EQ(out[t * 2 + q], 1.0 / (1.0 + std::exp(-p.offsets[0][q])));
}

TEST(GEval, DimensionMismatch) {
  EXPECT_THROW(g_eval(unit_network(), 0, std::vector<double>{1.0, 2.0}), Error);
}

TEST(PineForward, HandEvaluatedThreeNeighbors) {
  const auto out = pine_forward(unit_network(), scalar_bundle({{0.4, -1.0, 9.0}}));
  EXPECT_NEAR(out[0], 0.817574, 1e-6);
  EXPECT_DOUBLE_EQ(out[0], 1.0 / (1.0 + std::exp(-1.5)));
}

TEST(PineForward, PermutationGivesSameOutput) {
  const PineParams p = unit_network();
  const double a = pine_forward(p, scalar_bundle({{0.4, -1.0, 9.0}}))[0];
  const double b = pine_forward(p, scalar_bundle({{9.0, 0.4, -1.0}}))[0];
  EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(a));
}

TEST(PineForward, EmptyBundle) {
  EXPECT_DOUBLE_EQ(pine_forward(unit_network(), scalar_bundle({{}}))[0], 0.5);
}

TEST(PineForward, MatchesReference) {
  std::mt19937_64 gen(12);
  for (int i = 0; i < 200; ++i) {
    const auto inst = oracle::random_instance(gen, {});
    const auto got = pine_forward(inst.params, inst.bundle);
    const auto want = oracle::forward(inst.params, inst.bundle);
    for (std::size_t m = 0; m < got.size(); ++m) EXPECT_LE(oracle::relative_error(got[m], want[m], 1e-12), 1e-12);
  }
}

TEST(PineForward, RejectsBadBundles) {
  const PineParams p = unit_network();
  EXPECT_THROW(pine_forward(p, scalar_bundle({{1.0}, {2.0}})), Error);
  NeighborBundle wide;
  wide.groups.push_back(Columns(2, 1));
  EXPECT_THROW(pine_forward(p, wide), Error);
  EXPECT_THROW(pine_forward(p, scalar_bundle({{std::numeric_limits<double>::quiet_NaN()}})), Error);
}

TEST(PineBackward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 gen(2);
  const auto inst = oracle::random_instance(gen, {});
  const std::vector<double> zero(inst.params.shape.dim, 0.0);
  const auto g = pine_backward(inst.params, inst.bundle, zero);
  for (const Tensor* t : g.params.tensors())
    for (double x : t->data) EXPECT_EQ(x, 0.0);
  for (const auto& X : g.neighbors)
    for (double x : X.data) EXPECT_EQ(x, 0.0);
}

TEST(PineBackward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(gen, {2, 3, 2, 3, 0});
    std::vector<double> u(inst.params.shape.dim);
    for (double& x : u) x = unit(gen);
    auto f = [&] {
      const auto y = oracle::forward(inst.params, inst.bundle);
      double s = 0.0;
      for (std::size_t m = 0; m < y.size(); ++m) s += u[m] * y[m];
      return s;
    };
    const auto g = pine_backward(inst.params, inst.bundle, u);
    auto params = inst.params.tensors();
    auto grads = g.params.tensors();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto fd = oracle::central_difference(params[i]->data, f, 1e-5);
      for (std::size_t j = 0; j < fd.size(); ++j)
        EXPECT_LE(oracle::relative_error(grads[i]->data[j], fd[j], 1e-3), 1e-5) << params[i]->name << "[" << j << "]";
    }
    for (std::size_t k = 0; k < inst.bundle.groups.size(); ++k) {
      const auto fd = oracle::central_difference(inst.bundle.groups[k].data, f, 1e-5);
      for (std::size_t j = 0; j < fd.size(); ++j)
        EXPECT_LE(oracle::relative_error(g.neighbors[k].data[j], fd[j], 1e-3), 1e-5);
    }
  }
}

TEST(PineBackward, PermutationPermutesInputGradients) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::random_instance(gen, {2, 3, 3, 4, 2});
    // Reverse the columns of every type.
    NeighborBundle flipped = inst.bundle;
    for (auto& X : flipped.groups)
      for (std::size_t n = 0; n < X.count; ++n)
        std::copy_n(inst.bundle.groups[&X - flipped.groups.data()].data.begin() + (X.count - 1 - n) * X.dim, X.dim,
                    X.data.begin() + n * X.dim);
    const std::vector<double> u(inst.params.shape.dim, 1.0);
    const auto a = pine_backward(inst.params, inst.bundle, u);
    const auto b = pine_backward(inst.params, flipped, u);
    auto ta = a.params.tensors(), tb = b.params.tensors();
    for (std::size_t i = 0; i < ta.size(); ++i)
      for (std::size_t j = 0; j < ta[i]->size(); ++j)
        EXPECT_LE(oracle::relative_error(ta[i]->data[j], tb[i]->data[j], 1e-8), 1e-10);
    for (std::size_t k = 0; k < a.neighbors.size(); ++k) {
      const auto& X = a.neighbors[k];
      for (std::size_t n = 0; n < X.count; ++n)
        for (std::size_t j = 0; j < X.dim; ++j)
          EXPECT_LE(oracle::relative_error(X.data[n * X.dim + j],
                                           b.neighbors[k].data[(X.count - 1 - n) * X.dim + j], 1e-8),
                    1e-10);
    }
  }
}

TEST(Symmetrize, FirstColumnAveraged) {
  const auto b = scalar_bundle({{3.0, 8.0}});
  const double got = symmetrized_oracle([](const NeighborBundle& x) { return x.groups[0].data[0]; }, b);
  EXPECT_DOUBLE_EQ(got, 5.5);
}

TEST(Symmetrize, CountsTerms) {
  std::uint64_t visited = 0;
  int calls = 0;
  symmetrized_oracle(
      [&](const NeighborBundle&) {
        ++calls;
        return 1.0;
      },
      scalar_bundle({{1.0, 2.0}, {3.0}}), &visited);
  EXPECT_EQ(visited, 2u);
  EXPECT_EQ(calls, 2);
}

TEST(Symmetrize, InvariantFunctionIsFixedPoint) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 100; ++i) {
    const auto inst = oracle::random_instance(gen, {3, 3, 3, 4, 0});
    std::uint64_t perms = 1;
    for (const auto& g : inst.bundle.groups)
      for (std::size_t n = 2; n <= g.count; ++n) perms *= n;
    if (perms > 10000) continue;
    auto f = [&](const NeighborBundle& b) { return pine_forward(inst.params, b)[0]; };
    EXPECT_LE(oracle::relative_error(symmetrized_oracle(f, inst.bundle), f(inst.bundle), 1e-300), 1e-10);
  }
}

TEST(Symmetrize, MatchesBruteForceOnNonInvariantFunction) {
  std::mt19937_64 gen(6);
  for (int i = 0; i < 30; ++i) {
    const auto inst = oracle::random_instance(gen, {2, 2, 2, 4, 0});
    auto f = [](const NeighborBundle& b) {
      double s = 0.0, w = 1.0;
      for (const auto& X : b.groups)
        for (double x : X.data) s += (w *= 1.3) * x * x * x;
      return s;
    };
    EXPECT_NEAR(symmetrized_oracle(f, inst.bundle), oracle::brute_symmetrize(f, inst.bundle), 1e-10);
  }
}

TEST(Symmetrize, GuardExceeded) {
  // 8! = 40320 > 10000.
  EXPECT_THROW(symmetrized_oracle([](const NeighborBundle&) { return 0.0; },
                                  scalar_bundle({{1, 2, 3, 4, 5, 6, 7, 8}})),
               Error);
}

TEST(SmoothMax, ClosedFormValue) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_NEAR(smooth_max(v, 10), 2.9999546, 1e-6);
  const double e1 = std::exp(-20.0), e2 = std::exp(-10.0);
  EXPECT_NEAR(smooth_max(v, 10), (e1 * 1 + e2 * 2 + 3) / (e1 + e2 + 1), 1e-15);
}

TEST(SmoothMax, EqualValuesAndSingletonExact) {
  const std::vector<double> same(5, 0.1234567);
  EXPECT_EQ(smooth_max(same, 3.7), 0.1234567);
  EXPECT_EQ(smooth_max(same, 1e6), 0.1234567);
  const std::vector<double> one{-4.25};
  EXPECT_EQ(smooth_max(one, 10), -4.25);
}

TEST(SmoothMax, OverflowSafe) {
  const std::vector<double> big{1000.0, 999.0};
  const double got = smooth_max(big, 50);
  EXPECT_TRUE(std::isfinite(got));
  EXPECT_NEAR(got, 1000.0, 1e-18 + 1000.0 * std::exp(-50.0) * 2);
}

TEST(SmoothMax, ErrorBoundWithGap) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    // Maximum at least 0.5 above every other value in [0, 1].
    std::vector<double> v(2 + gen() % 6);
    const double top = 0.5 + 0.5 * unit(gen);
    for (double& x : v) x = unit(gen) * (top - 0.5);
    v[gen() % v.size()] = top;
    EXPECT_LE(top - smooth_max(v, 20), 1e-3);
    EXPECT_LE(top - smooth_max(v, 20), (v.size() - 1) * 1.0 * std::exp(-20 * 0.5));
  }
}

TEST(SmoothMax, Errors) {
  EXPECT_THROW(smooth_max(std::vector<double>{}, 1.0), Error);
  EXPECT_THROW(smooth_max(std::vector<double>{1.0}, std::numeric_limits<double>::infinity()), Error);
}

TEST(InitParams, DeterministicAndBounded) {
  const PineParams a = init_params(2, 4, 3, 5, 6, 42);
  const PineParams b = init_params(2, 4, 3, 5, 6, 42);
  const PineParams c = init_params(2, 4, 3, 5, 6, 43);
  a.validate();
  auto ta = a.tensors(), tb = b.tensors(), tc = c.tensors();
  bool any_diff = false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i]->data, tb[i]->data);
    any_diff = any_diff || ta[i]->data != tc[i]->data;
  }
  EXPECT_TRUE(any_diff);
  const double s = 1.0 / std::sqrt(2.0 * 5 * 6);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(a.directions[k].shape, (std::vector<std::size_t>{1, 5, 4}));
    EXPECT_EQ(a.mixing[k].shape, (std::vector<std::size_t>{1, 3, 5, 6}));
    for (double x : a.directions[k].data) EXPECT_LE(std::abs(x), 0.5);
    for (double x : a.scales[k].data) EXPECT_LE(std::abs(x), 0.5);
    for (double x : a.offsets[k].data) EXPECT_LE(std::abs(x), 0.5);
    for (double x : a.mixing[k].data) EXPECT_LE(std::abs(x), s);
  }
  for (double x : a.readout.data) EXPECT_LE(std::abs(x), 1.0 / std::sqrt(3.0));
  for (double x : a.hidden_bias.data) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(a.readout.shape, (std::vector<std::size_t>{4, 3}));
}

TEST(InitParams, IndependentSharingReplicates) {
  PineShape s{1, 3, 2, {2}, {2}, Activation::tanh, Sharing::independent};
  const PineParams p = init_params(s, 1);
  EXPECT_EQ(p.directions[0].shape[0], 3u);
  EXPECT_EQ(p.hidden_bias.shape, (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(p.replica_of(2), 2);
}

TEST(PineShape, RejectsNonPositive) {
  PineShape s{1, 0, 1, {1}, {1}, Activation::logistic, Sharing::shared};
  EXPECT_THROW(s.validate(), Error);
  s.dim = 1;
  s.num_directions = {1, 1};
  EXPECT_THROW(s.validate(), Error);
}

TEST(Activation, TextRoundTrip) {
  EXPECT_EQ(parse_activation(to_string(Activation::tanh)), Activation::tanh);
  EXPECT_EQ(parse_sharing(to_string(Sharing::independent)), Sharing::independent);
  EXPECT_THROW(parse_activation("relu"), Error);
}
