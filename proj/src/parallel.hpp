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

#ifndef PINE_SRC_PARALLEL_HPP_
#define PINE_SRC_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pine::detail {

// Splits [0, count) into `workers` contiguous shards and runs
// fn(worker, begin, end) for each; shard 0 runs on the calling thread.
// The first exception (by worker index) is rethrown.
template <typename Fn>
void for_each_shard(int workers, std::size_t count, Fn&& fn) {
  workers = std::max(1, workers);
  auto bounds = [&](int w) {
    return count * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
  };
  if (workers == 1) {
    fn(0, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        fn(w, bounds(w), bounds(w + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  try {
    fn(0, bounds(0), bounds(1));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pine::detail

#endif  // PINE_SRC_PARALLEL_HPP_
