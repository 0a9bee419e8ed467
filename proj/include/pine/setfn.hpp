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

#ifndef PINE_SETFN_HPP_
#define PINE_SETFN_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pine/tensor.hpp"

namespace pine {

enum class Activation { logistic, tanh };

const char* to_string(Activation act);
Activation parse_activation(std::string_view text);

inline double activate(Activation act, double z) {
  return act == Activation::logistic ? 1.0 / (1.0 + std::exp(-z))
                                     : std::tanh(z);
}

// Derivative expressed through the activation's output y = act(z).
inline double activate_slope(Activation act, double y) {
  return act == Activation::logistic ? y * (1.0 - y) : 1.0 - y * y;
}

// How the d output coordinates share the network. `shared`: one set of inner
// layers and hidden biases, a readout row per coordinate. `independent`: a
// full replica of the inner layers per coordinate.
enum class Sharing { shared, independent };

const char* to_string(Sharing sharing);
Sharing parse_sharing(std::string_view text);

struct PineShape {
  int num_types = 1;
  int dim = 1;         // embedding dimension, both input and output
  int num_hidden = 1;  // width of the outer layer
  std::vector<int> num_directions;  // per type: projection directions
  std::vector<int> num_scales;      // per type: scale/offset pairs
  Activation activation = Activation::logistic;
  Sharing sharing = Sharing::shared;

  void validate() const;
  int replicas() const { return sharing == Sharing::shared ? 1 : dim; }
  // Inner feature count of one type: directions x scales.
  std::size_t features(int type) const {
    return static_cast<std::size_t>(num_directions[type]) * num_scales[type];
  }
  // Offset of the (replica, type) block in a pooled feature vector.
  std::size_t pooled_offset(int replica, int type) const;
  std::size_t pooled_size() const;
  bool operator==(const PineShape&) const = default;
};

// Shared parameters of the aggregation network. For replica r, type k,
// direction t, scale q, hidden unit l and output coordinate m:
//
//   feature_{t,q}(x) = act(scale_q * <direction_t, x> + offset_q)
//   hidden_l         = act(sum_k sum_{t,q} mixing_{l,t,q} * pooled_{k,t,q}
//                          + hidden_bias_l)
//   out_m            = sum_l readout_{m,l} * hidden_l
//
// where pooled_k is the sum of feature(x) over the type-k neighbors.
struct PineParams {
  PineShape shape;
  std::vector<Tensor> directions;  // per type: [R, T_k, d]
  std::vector<Tensor> scales;      // per type: [R, Q_k]
  std::vector<Tensor> offsets;     // per type: [R, Q_k]
  std::vector<Tensor> mixing;      // per type: [R, L, T_k, Q_k]
  Tensor hidden_bias;              // [R, L]
  Tensor readout;                  // [d, L]

  static PineParams zeros(const PineShape& shape);

  int replica_of(int coordinate) const {
    return shape.sharing == Sharing::shared ? 0 : coordinate;
  }
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  void add(const PineParams& other);
  // Shape and finiteness invariants.
  void validate() const;
};

// d x N matrix stored column-major: column n holds one neighbor embedding.
struct Columns {
  std::size_t dim = 0;
  std::size_t count = 0;
  std::vector<double> data;

  Columns() = default;
  Columns(std::size_t d, std::size_t n) : dim(d), count(n), data(d * n, 0.0) {}

  std::span<double> col(std::size_t n) { return {data.data() + n * dim, dim}; }
  std::span<const double> col(std::size_t n) const {
    return {data.data() + n * dim, dim};
  }
};

// Typed neighbor embeddings of one target node: one Columns per type.
struct NeighborBundle {
  std::vector<Columns> groups;
};

struct PineGradients {
  PineParams params;
  std::vector<Columns> neighbors;  // same shapes as the bundle groups
};

// Per-neighbor encoder of type `type` for replica `replica`:
// entry t * Q + q is act(scale_q * <direction_t, x> + offset_q).
std::vector<double> g_eval(const PineParams& params, int type,
                           std::span<const double> x, int replica = 0);

// Encoder with caller-provided buffers; `projection` receives the T
// projections <direction_t, x>, `features` the T*Q encoder outputs.
void encode(const PineParams& params, int replica, int type,
            std::span<const double> x, std::span<double> projection,
            std::span<double> features);

// Backpropagates d(features) through one encoder evaluation, accumulating
// into grads (directions, scales, offsets) and into dx.
void encode_backward(const PineParams& params, int replica, int type,
                     std::span<const double> x,
                     std::span<const double> projection,
                     std::span<const double> features,
                     std::span<const double> dfeatures, PineParams& grads,
                     std::span<double> dx);

// Outer layers: pooled features (PineShape::pooled_size) -> output[d].
// `hidden` ([R*L]) receives the hidden activations for the backward pass.
void outer_forward(const PineParams& params, std::span<const double> pooled,
                   std::span<double> hidden, std::span<double> output);

// Accumulates outer-layer gradients (mixing, hidden_bias, readout) into
// grads and adds d(pooled) into dpooled.
void outer_backward(const PineParams& params, std::span<const double> pooled,
                    std::span<const double> hidden,
                    std::span<const double> upstream, PineParams& grads,
                    std::span<double> dpooled);

std::vector<double> pine_forward(const PineParams& params,
                                 const NeighborBundle& bundle);

// Exact gradient of <upstream, pine_forward(params, bundle)>.
PineGradients pine_backward(const PineParams& params,
                            const NeighborBundle& bundle,
                            std::span<const double> upstream);

using BundleFunction = std::function<double(const NeighborBundle&)>;

inline constexpr std::uint64_t kSymmetrizationLimit = 10'000;

// Average of fn over every within-type column permutation of the bundle.
// Throws when the product of per-type factorials exceeds the limit.
double symmetrized_oracle(const BundleFunction& fn, const NeighborBundle& bundle,
                          std::uint64_t* terms_visited = nullptr);

// sum exp(k x_i) x_i / sum exp(k x_i), evaluated after subtracting max x.
double smooth_max(std::span<const double> values, double k);

// Seeded initialization:
//   directions ~ U(-1/sqrt(d), 1/sqrt(d)), scales, offsets ~ U(-0.5, 0.5),
//   mixing ~ U(-s, s) with s = 1/sqrt(sum_k T_k Q_k),
//   readout ~ U(-1/sqrt(L), 1/sqrt(L)), hidden_bias = 0.
PineParams init_params(const PineShape& shape, std::uint64_t seed);

PineParams init_params(int num_types, int dim, int num_hidden,
                       int num_directions, int num_scales, std::uint64_t seed);

}  // namespace pine

#endif  // PINE_SETFN_HPP_
