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

#include "pine/setfn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pine/error.hpp"
#include "pine/rng.hpp"

namespace pine {

const char* to_string(Activation act) {
  return act == Activation::logistic ? "logistic" : "tanh";
}

Activation parse_activation(std::string_view text) {
  if (text == "logistic") return Activation::logistic;
  if (text == "tanh") return Activation::tanh;
  fail(ErrorCode::invalid_argument,
       "unknown activation '" + std::string(text) + "'");
}

const char* to_string(Sharing sharing) {
  return sharing == Sharing::shared ? "shared" : "independent";
}

Sharing parse_sharing(std::string_view text) {
  if (text == "shared") return Sharing::shared;
  if (text == "independent") return Sharing::independent;
  fail(ErrorCode::invalid_argument,
       "unknown sharing mode '" + std::string(text) + "'");
}

void PineShape::validate() const {
  require(num_types >= 1, "num_types must be positive");
  require(dim >= 1, "dim must be positive");
  require(num_hidden >= 1, "num_hidden must be positive");
  require(num_directions.size() == static_cast<std::size_t>(num_types) &&
              num_scales.size() == static_cast<std::size_t>(num_types),
          "per-type widths must have one entry per type");
  for (int k = 0; k < num_types; ++k)
    require(num_directions[k] >= 1 && num_scales[k] >= 1,
            "per-type widths must be positive");
}

std::size_t PineShape::pooled_offset(int replica, int type) const {
  std::size_t per_replica = 0;
  std::size_t within = 0;
  for (int k = 0; k < num_types; ++k) {
    if (k == type) within = per_replica;
    per_replica += features(k);
  }
  return replica * per_replica + within;
}

std::size_t PineShape::pooled_size() const {
  std::size_t per_replica = 0;
  for (int k = 0; k < num_types; ++k) per_replica += features(k);
  return per_replica * replicas();
}

PineParams PineParams::zeros(const PineShape& shape) {
  shape.validate();
  const std::size_t r = shape.replicas();
  const std::size_t d = shape.dim;
  const std::size_t l = shape.num_hidden;
  PineParams p;
  p.shape = shape;
  for (int k = 0; k < shape.num_types; ++k) {
    const std::size_t t = shape.num_directions[k];
    const std::size_t q = shape.num_scales[k];
    const std::string suffix = "." + std::to_string(k);
    p.directions.emplace_back("pine.directions" + suffix,
                              std::vector<std::size_t>{r, t, d});
    p.scales.emplace_back("pine.scales" + suffix, std::vector<std::size_t>{r, q});
    p.offsets.emplace_back("pine.offsets" + suffix,
                           std::vector<std::size_t>{r, q});
    p.mixing.emplace_back("pine.mixing" + suffix,
                          std::vector<std::size_t>{r, l, t, q});
  }
  p.hidden_bias = Tensor("pine.hidden_bias", {r, l});
  p.readout = Tensor("pine.readout", {d, l});
  return p;
}

std::vector<Tensor*> PineParams::tensors() {
  std::vector<Tensor*> out;
  for (int k = 0; k < shape.num_types; ++k) {
    out.push_back(&directions[k]);
    out.push_back(&scales[k]);
    out.push_back(&offsets[k]);
    out.push_back(&mixing[k]);
  }
  out.push_back(&hidden_bias);
  out.push_back(&readout);
  return out;
}

std::vector<const Tensor*> PineParams::tensors() const {
  auto mut = const_cast<PineParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

void PineParams::add(const PineParams& other) {
  auto mine = tensors();
  auto theirs = other.tensors();
  for (std::size_t i = 0; i < mine.size(); ++i) mine[i]->add(*theirs[i]);
}

void PineParams::validate() const {
  shape.validate();
  const PineParams expected = zeros(shape);
  auto mine = tensors();
  auto ref = expected.tensors();
  if (mine.size() != ref.size())
    fail(ErrorCode::state, "parameter tensor count mismatch");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (!mine[i]->same_shape(*ref[i]) || mine[i]->size() != ref[i]->size())
      fail(ErrorCode::state, "tensor " + ref[i]->name + " has wrong shape");
    if (!mine[i]->all_finite())
      fail(ErrorCode::numeric, "tensor " + ref[i]->name + " is not finite");
  }
}

void encode(const PineParams& params, int replica, int type,
            std::span<const double> x, std::span<double> projection,
            std::span<double> features) {
  const auto& shape = params.shape;
  const std::size_t d = shape.dim;
  const std::size_t t_count = shape.num_directions[type];
  const std::size_t q_count = shape.num_scales[type];
  const double* dir = params.directions[type].data.data() + replica * t_count * d;
  const double* scale = params.scales[type].data.data() + replica * q_count;
  const double* offset = params.offsets[type].data.data() + replica * q_count;
  for (std::size_t t = 0; t < t_count; ++t) {
    const double p = dot({dir + t * d, d}, x);
    projection[t] = p;
    for (std::size_t q = 0; q < q_count; ++q)
      features[t * q_count + q] =
          activate(shape.activation, scale[q] * p + offset[q]);
  }
}

void encode_backward(const PineParams& params, int replica, int type,
                     std::span<const double> x,
                     std::span<const double> projection,
                     std::span<const double> features,
                     std::span<const double> dfeatures, PineParams& grads,
                     std::span<double> dx) {
  const auto& shape = params.shape;
  const std::size_t d = shape.dim;
  const std::size_t t_count = shape.num_directions[type];
  const std::size_t q_count = shape.num_scales[type];
  const std::size_t dir_base = replica * t_count * d;
  const double* dir = params.directions[type].data.data() + dir_base;
  const double* scale = params.scales[type].data.data() + replica * q_count;
  double* ddir = grads.directions[type].data.data() + dir_base;
  double* dscale = grads.scales[type].data.data() + replica * q_count;
  double* doffset = grads.offsets[type].data.data() + replica * q_count;
  for (std::size_t t = 0; t < t_count; ++t) {
    double dproj = 0.0;
    for (std::size_t q = 0; q < q_count; ++q) {
      const std::size_t f = t * q_count + q;
      const double dpre =
          dfeatures[f] * activate_slope(shape.activation, features[f]);
      dscale[q] += dpre * projection[t];
      doffset[q] += dpre;
      dproj += dpre * scale[q];
    }
    if (dproj == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      ddir[t * d + i] += dproj * x[i];
      dx[i] += dproj * dir[t * d + i];
    }
  }
}

void outer_forward(const PineParams& params, std::span<const double> pooled,
                   std::span<double> hidden, std::span<double> output) {
  const auto& shape = params.shape;
  const int replicas = shape.replicas();
  const std::size_t l_count = shape.num_hidden;
  for (int r = 0; r < replicas; ++r) {
    for (std::size_t l = 0; l < l_count; ++l) {
      double z = params.hidden_bias[r * l_count + l];
      for (int k = 0; k < shape.num_types; ++k) {
        const std::size_t f_count = shape.features(k);
        const double* w =
            params.mixing[k].data.data() + (r * l_count + l) * f_count;
        const double* s = pooled.data() + shape.pooled_offset(r, k);
        for (std::size_t f = 0; f < f_count; ++f) z += w[f] * s[f];
      }
      hidden[r * l_count + l] = activate(shape.activation, z);
    }
  }
  for (int m = 0; m < shape.dim; ++m) {
    const double* h = hidden.data() + params.replica_of(m) * l_count;
    output[m] = dot({params.readout.data.data() + m * l_count, l_count},
                    {h, l_count});
  }
}

void outer_backward(const PineParams& params, std::span<const double> pooled,
                    std::span<const double> hidden,
                    std::span<const double> upstream, PineParams& grads,
                    std::span<double> dpooled) {
  const auto& shape = params.shape;
  const std::size_t l_count = shape.num_hidden;
  std::vector<double> dz(shape.replicas() * l_count, 0.0);
  for (int m = 0; m < shape.dim; ++m) {
    if (upstream[m] == 0.0) continue;
    const std::size_t base = params.replica_of(m) * l_count;
    for (std::size_t l = 0; l < l_count; ++l) {
      grads.readout[m * l_count + l] += upstream[m] * hidden[base + l];
      dz[base + l] += upstream[m] * params.readout[m * l_count + l];
    }
  }
  for (int r = 0; r < shape.replicas(); ++r) {
    for (std::size_t l = 0; l < l_count; ++l) {
      const std::size_t idx = r * l_count + l;
      if (dz[idx] == 0.0) continue;
      const double g = dz[idx] * activate_slope(shape.activation, hidden[idx]);
      grads.hidden_bias[idx] += g;
      for (int k = 0; k < shape.num_types; ++k) {
        const std::size_t f_count = shape.features(k);
        const std::size_t w_base = idx * f_count;
        const double* w = params.mixing[k].data.data() + w_base;
        double* dw = grads.mixing[k].data.data() + w_base;
        const std::size_t s_base = shape.pooled_offset(r, k);
        for (std::size_t f = 0; f < f_count; ++f) {
          dw[f] += g * pooled[s_base + f];
          dpooled[s_base + f] += g * w[f];
        }
      }
    }
  }
}

namespace {

void check_bundle(const PineParams& params, const NeighborBundle& bundle) {
  const auto& shape = params.shape;
  if (bundle.groups.size() != static_cast<std::size_t>(shape.num_types))
    fail(ErrorCode::invalid_argument,
         "bundle has " + std::to_string(bundle.groups.size()) +
             " groups, expected " + std::to_string(shape.num_types));
  for (const auto& group : bundle.groups) {
    if (group.count > 0 && group.dim != static_cast<std::size_t>(shape.dim))
      fail(ErrorCode::invalid_argument, "bundle column dimension mismatch");
    if (group.data.size() != group.dim * group.count)
      fail(ErrorCode::invalid_argument, "bundle storage size mismatch");
    for (double x : group.data)
      if (!std::isfinite(x))
        fail(ErrorCode::numeric, "bundle contains a non-finite entry");
  }
}

}  // namespace

std::vector<double> g_eval(const PineParams& params, int type,
                           std::span<const double> x, int replica) {
  require(type >= 0 && type < params.shape.num_types, "type out of range");
  require(replica >= 0 && replica < params.shape.replicas(),
          "replica out of range");
  require(x.size() == static_cast<std::size_t>(params.shape.dim),
          "input length " + std::to_string(x.size()) + " does not match dim " +
              std::to_string(params.shape.dim));
  std::vector<double> projection(params.shape.num_directions[type]);
  std::vector<double> features(params.shape.features(type));
  encode(params, replica, type, x, projection, features);
  return features;
}

std::vector<double> pine_forward(const PineParams& params,
                                 const NeighborBundle& bundle) {
  check_bundle(params, bundle);
  const auto& shape = params.shape;
  std::vector<double> pooled(shape.pooled_size(), 0.0);
  std::vector<double> projection;
  std::vector<double> features;
  for (int r = 0; r < shape.replicas(); ++r) {
    for (int k = 0; k < shape.num_types; ++k) {
      projection.resize(shape.num_directions[k]);
      features.resize(shape.features(k));
      double* sum = pooled.data() + shape.pooled_offset(r, k);
      for (std::size_t n = 0; n < bundle.groups[k].count; ++n) {
        encode(params, r, k, bundle.groups[k].col(n), projection, features);
        for (std::size_t f = 0; f < features.size(); ++f) sum[f] += features[f];
      }
    }
  }
  std::vector<double> hidden(shape.replicas() * shape.num_hidden);
  std::vector<double> output(shape.dim);
  outer_forward(params, pooled, hidden, output);
  return output;
}

PineGradients pine_backward(const PineParams& params,
                            const NeighborBundle& bundle,
                            std::span<const double> upstream) {
  check_bundle(params, bundle);
  const auto& shape = params.shape;
  require(upstream.size() == static_cast<std::size_t>(shape.dim),
          "upstream length does not match dim");

  // Forward pass, keeping every encoder evaluation.
  struct Eval {
    std::vector<double> projection;
    std::vector<double> features;
  };
  std::vector<std::vector<std::vector<Eval>>> evals(shape.replicas());
  std::vector<double> pooled(shape.pooled_size(), 0.0);
  for (int r = 0; r < shape.replicas(); ++r) {
    evals[r].resize(shape.num_types);
    for (int k = 0; k < shape.num_types; ++k) {
      double* sum = pooled.data() + shape.pooled_offset(r, k);
      for (std::size_t n = 0; n < bundle.groups[k].count; ++n) {
        Eval e{std::vector<double>(shape.num_directions[k]),
               std::vector<double>(shape.features(k))};
        encode(params, r, k, bundle.groups[k].col(n), e.projection,
               e.features);
        for (std::size_t f = 0; f < e.features.size(); ++f)
          sum[f] += e.features[f];
        evals[r][k].push_back(std::move(e));
      }
    }
  }
  std::vector<double> hidden(shape.replicas() * shape.num_hidden);
  std::vector<double> output(shape.dim);
  outer_forward(params, pooled, hidden, output);

  PineGradients grads{PineParams::zeros(shape), {}};
  for (const auto& group : bundle.groups)
    grads.neighbors.emplace_back(shape.dim, group.count);
  std::vector<double> dpooled(pooled.size(), 0.0);
  outer_backward(params, pooled, hidden, upstream, grads.params, dpooled);
  for (int r = 0; r < shape.replicas(); ++r) {
    for (int k = 0; k < shape.num_types; ++k) {
      std::span<const double> dfeat(dpooled.data() + shape.pooled_offset(r, k),
                                    shape.features(k));
      for (std::size_t n = 0; n < bundle.groups[k].count; ++n) {
        const Eval& e = evals[r][k][n];
        encode_backward(params, r, k, bundle.groups[k].col(n), e.projection,
                        e.features, dfeat, grads.params,
                        grads.neighbors[k].col(n));
      }
    }
  }
  return grads;
}

double symmetrized_oracle(const BundleFunction& fn, const NeighborBundle& bundle,
                          std::uint64_t* terms_visited) {
  std::uint64_t total = 1;
  for (const auto& group : bundle.groups) {
    for (std::uint64_t i = 2; i <= group.count; ++i) {
      total *= i;
      if (total > kSymmetrizationLimit)
        fail(ErrorCode::invalid_argument,
             "symmetrization needs more than " +
                 std::to_string(kSymmetrizationLimit) + " permutations");
    }
  }

  std::vector<std::vector<std::size_t>> order(bundle.groups.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k].resize(bundle.groups[k].count);
    std::iota(order[k].begin(), order[k].end(), std::size_t{0});
  }
  NeighborBundle permuted = bundle;
  double sum = 0.0;
  std::uint64_t visited = 0;
  while (true) {
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& src = bundle.groups[k];
      auto& dst = permuted.groups[k];
      for (std::size_t n = 0; n < src.count; ++n) {
        auto from = src.col(order[k][n]);
        std::copy(from.begin(), from.end(), dst.col(n).begin());
      }
    }
    sum += fn(permuted);
    ++visited;
    // Odometer over the per-type permutations; next_permutation wraps each
    // digit back to sorted order.
    std::size_t k = order.size();
    while (k > 0 && !std::next_permutation(order[k - 1].begin(),
                                           order[k - 1].end()))
      --k;
    if (k == 0) break;
  }
  if (terms_visited) *terms_visited = visited;
  return sum / static_cast<double>(visited);
}

double smooth_max(std::span<const double> values, double k) {
  require(!values.empty(), "smooth_max of an empty list");
  require(std::isfinite(k), "smooth_max sharpness must be finite");
  const double top = *std::max_element(values.begin(), values.end());
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (double x : values) {
    const double w = std::exp(k * (x - top));
    weight_sum += w;
    weighted += w * (x - top);
  }
  return top + weighted / weight_sum;
}

PineParams init_params(const PineShape& shape, std::uint64_t seed) {
  PineParams p = PineParams::zeros(shape);
  Rng rng(seed);
  auto fill = [&](Tensor& t, double bound) {
    for (double& x : t.data) x = rng.uniform(-bound, bound);
  };
  std::size_t feature_total = 0;
  for (int k = 0; k < shape.num_types; ++k) feature_total += shape.features(k);
  const double mix_bound = 1.0 / std::sqrt(static_cast<double>(feature_total));
  for (int k = 0; k < shape.num_types; ++k) {
    fill(p.directions[k], 1.0 / std::sqrt(static_cast<double>(shape.dim)));
    fill(p.scales[k], 0.5);
    fill(p.offsets[k], 0.5);
    fill(p.mixing[k], mix_bound);
  }
  fill(p.readout, 1.0 / std::sqrt(static_cast<double>(shape.num_hidden)));
  return p;
}

PineParams init_params(int num_types, int dim, int num_hidden,
                       int num_directions, int num_scales, std::uint64_t seed) {
  PineShape shape;
  shape.num_types = num_types;
  shape.dim = dim;
  shape.num_hidden = num_hidden;
  shape.num_directions.assign(std::max(num_types, 0), num_directions);
  shape.num_scales.assign(std::max(num_types, 0), num_scales);
  return init_params(shape, seed);
}

}  // namespace pine
