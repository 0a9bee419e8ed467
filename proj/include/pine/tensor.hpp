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

#ifndef PINE_TENSOR_HPP_
#define PINE_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pine {

// Named dense row-major array of doubles. The unit of optimization and of
// checkpoint serialization.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::string tensor_name, std::vector<std::size_t> dims)
      : name(std::move(tensor_name)), shape(std::move(dims)) {
    data.assign(element_count(shape), 0.0);
  }

  static std::size_t element_count(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           std::multiplies<>());
  }

  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  std::span<double> values() { return data; }
  std::span<const double> values() const { return data; }

  void fill(double value) { std::fill(data.begin(), data.end(), value); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool all_finite() const {
    return std::all_of(data.begin(), data.end(),
                       [](double x) { return std::isfinite(x); });
  }

  Tensor zeros_like() const {
    Tensor t(name, shape);
    return t;
  }

  void add(const Tensor& other) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += other.data[i];
  }

  double squared_norm() const {
    double s = 0.0;
    for (double x : data) s += x * x;
    return s;
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace pine

#endif  // PINE_TENSOR_HPP_
