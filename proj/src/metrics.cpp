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

#include "pine/metrics.hpp"

#include "pine/error.hpp"

namespace pine {

double accuracy(const std::map<NodeId, int>& predicted,
                const std::map<NodeId, int>& truth) {
  if (truth.empty()) fail(ErrorCode::invalid_argument, "empty test set");
  if (predicted.size() != truth.size())
    fail(ErrorCode::invalid_argument,
         "prediction and truth cover different nodes");
  std::size_t hits = 0;
  auto p = predicted.begin();
  for (auto t = truth.begin(); t != truth.end(); ++t, ++p) {
    if (p->first != t->first)
      fail(ErrorCode::invalid_argument,
           "prediction and truth cover different nodes");
    if (p->second == t->second) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

F1Scores f1_scores(std::span<const std::vector<std::uint8_t>> predicted,
                   std::span<const std::vector<std::uint8_t>> truth,
                   int num_classes) {
  require(num_classes > 0, "need at least one label");
  if (predicted.size() != truth.size())
    fail(ErrorCode::invalid_argument, "prediction/truth row count mismatch");
  const auto c = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> tp(c, 0), fp(c, 0), fn(c, 0);
  for (std::size_t r = 0; r < truth.size(); ++r) {
    if (predicted[r].size() != c || truth[r].size() != c)
      fail(ErrorCode::invalid_argument, "indicator length mismatch");
    for (std::size_t i = 0; i < c; ++i) {
      const bool p = predicted[r][i] != 0;
      const bool t = truth[r][i] != 0;
      tp[i] += p && t;
      fp[i] += p && !t;
      fn[i] += !p && t;
    }
  }
  auto f1 = [](std::size_t tp_, std::size_t fp_, std::size_t fn_) {
    const std::size_t denom = 2 * tp_ + fp_ + fn_;
    return denom == 0 ? 0.0 : 2.0 * tp_ / static_cast<double>(denom);
  };
  F1Scores out;
  std::size_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (std::size_t i = 0; i < c; ++i) {
    out.macro += f1(tp[i], fp[i], fn[i]);
    tp_all += tp[i];
    fp_all += fp[i];
    fn_all += fn[i];
  }
  out.macro /= static_cast<double>(c);
  out.micro = f1(tp_all, fp_all, fn_all);
  return out;
}

}  // namespace pine
