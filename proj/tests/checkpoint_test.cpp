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

#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "pine/checkpoint.hpp"
#include "pine/error.hpp"
#include "test_util.hpp"

using namespace pine;
using testing_util::TempDir;

namespace {

ModelState sample_state() {
  PineShape s{2, 3, 4, {2, 3}, {3, 2}, Activation::tanh, Sharing::independent};
  return init_model(s, 9, 4, 17, 0.3);
}

}  // namespace

TEST(Checkpoint, ExactRoundTrip) {
  TempDir dir;
  const ModelState state = sample_state();
  AdamState adam;
  adam.hyper.learning_rate = 0.02;
  adam.hyper.decay = 0.5;
  auto ts = state.tensors();
  adam.reset(ts);
  adam.step = 7;
  adam.first[3][1] = 1.0 / 3.0;
  adam.second[0][0] = 1e-300;
  save_checkpoint(dir / "m.ckpt", state, &adam, {{"note", "hello world"}});
  const Checkpoint back = load_checkpoint(dir / "m.ckpt");
  ASSERT_TRUE(back.adam.has_value());
  EXPECT_EQ(back.meta.at("note"), "hello world");
  EXPECT_EQ(back.state.pine.shape, state.pine.shape);
  auto a = state.tensors(), b = back.state.tensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->shape, b[i]->shape);
    EXPECT_EQ(a[i]->data, b[i]->data);
  }
  EXPECT_EQ(back.adam->step, 7u);
  EXPECT_EQ(back.adam->hyper.learning_rate, 0.02);
  EXPECT_EQ(back.adam->hyper.decay, 0.5);
  EXPECT_EQ(back.adam->first[3][1], 1.0 / 3.0);
  EXPECT_EQ(back.adam->second[0][0], 1e-300);
}

TEST(Checkpoint, WithoutOptimizer) {
  TempDir dir;
  save_checkpoint(dir / "m.ckpt", sample_state(), nullptr);
  EXPECT_FALSE(load_checkpoint(dir / "m.ckpt").adam.has_value());
}

TEST(Checkpoint, CorruptionDetected) {
  TempDir dir;
  save_checkpoint(dir / "m.ckpt", sample_state(), nullptr);
  const std::string bytes = testing_util::read_file(dir / "m.ckpt");
  testing_util::write_file(dir / "short.ckpt", bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_checkpoint(dir / "short.ckpt"), Error);
  testing_util::write_file(dir / "long.ckpt", bytes + "x");
  EXPECT_THROW(load_checkpoint(dir / "long.ckpt"), Error);
  std::string magic = bytes;
  magic[0] = 'X';
  testing_util::write_file(dir / "magic.ckpt", magic);
  EXPECT_THROW(load_checkpoint(dir / "magic.ckpt"), Error);
  testing_util::write_file(dir / "empty.ckpt", "");
  EXPECT_THROW(load_checkpoint(dir / "empty.ckpt"), Error);
  try {
    load_checkpoint(dir / "absent.ckpt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

TEST(Checkpoint, UnwritablePath) {
  EXPECT_THROW(save_checkpoint("/nonexistent-dir/x.ckpt", sample_state(), nullptr), Error);
}
