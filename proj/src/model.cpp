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

#include "pine/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "pine/error.hpp"
#include "pine/rng.hpp"

namespace pine {

ModelState ModelState::zeros_like() const {
  ModelState z;
  z.embeddings = embeddings.zeros_like();
  z.pine = PineParams::zeros(pine.shape);
  z.head.weights = head.weights.zeros_like();
  z.head.bias = head.bias.zeros_like();
  return z;
}

std::vector<Tensor*> ModelState::tensors() {
  std::vector<Tensor*> out{&embeddings};
  for (Tensor* t : pine.tensors()) out.push_back(t);
  out.push_back(&head.weights);
  out.push_back(&head.bias);
  return out;
}

std::vector<const Tensor*> ModelState::tensors() const {
  auto mut = const_cast<ModelState*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

void ModelState::validate() const {
  pine.validate();
  const std::size_t d = pine.shape.dim;
  if (embeddings.shape.size() != 2 || embeddings.shape[1] != d ||
      embeddings.size() != embeddings.shape[0] * d)
    fail(ErrorCode::state, "embedding table shape mismatch");
  const std::size_t c = head.bias.size();
  if (head.weights.shape != std::vector<std::size_t>{c, d} ||
      head.bias.shape != std::vector<std::size_t>{c})
    fail(ErrorCode::state, "head shape mismatch");
  if (!embeddings.all_finite() || !head.weights.all_finite() ||
      !head.bias.all_finite())
    fail(ErrorCode::numeric, "model state contains non-finite values");
}

ModelState init_model(const PineShape& shape, std::size_t node_count,
                      int num_classes, std::uint64_t seed, double init_scale) {
  require(num_classes >= 0, "negative class count");
  const std::size_t d = shape.dim;
  const double bound =
      init_scale > 0.0 ? init_scale : 1.0 / std::sqrt(static_cast<double>(d));
  ModelState s;
  s.pine = init_params(shape, derive_seed(seed, "init.pine"));
  s.embeddings = Tensor("embeddings", {node_count, d});
  Rng emb_rng(derive_seed(seed, "init.embeddings"));
  for (double& x : s.embeddings.data) x = emb_rng.uniform(-bound, bound);
  const auto c = static_cast<std::size_t>(num_classes);
  s.head.weights = Tensor("head.weights", {c, d});
  s.head.bias = Tensor("head.bias", {c});
  Rng head_rng(derive_seed(seed, "init.head"));
  for (double& x : s.head.weights.data) x = head_rng.uniform(-bound, bound);
  return s;
}

namespace {

// Typed neighbor list of v, capped by a seeded subsample that depends only
// on (sample_seed, v, type). The subsample is returned in ascending order.
std::span<const NodeId> capped_neighbors(const HeteroGraph& graph, NodeId v,
                                         int type, const ReconOptions& opt,
                                         std::vector<NodeId>& scratch) {
  auto all = graph.neighbors(v, type);
  if (opt.neighbor_cap == 0 || all.size() <= opt.neighbor_cap) return all;
  scratch.assign(all.begin(), all.end());
  Rng rng(derive_seed(opt.sample_seed, "neighbors",
                      static_cast<std::uint64_t>(v) * graph.num_types() + type));
  for (std::size_t i = 0; i < opt.neighbor_cap; ++i)
    std::swap(scratch[i], scratch[i + rng.below(scratch.size() - i)]);
  scratch.resize(opt.neighbor_cap);
  std::sort(scratch.begin(), scratch.end());
  return scratch;
}

// Per-node encoder cache: projections and features of every replica, laid
// out per node as [R, T_k] and [R, T_k * Q_k] for the node's own type k.
struct EncoderCache {
  std::vector<std::size_t> proj_offset;
  std::vector<std::size_t> feat_offset;
  std::vector<double> projection;
  std::vector<double> features;
};

}  // namespace

double reconstruction_loss(const ModelState& state, const HeteroGraph& graph,
                           std::span<const double> lambdas,
                           ModelGradients* grads, const ReconOptions& options) {
  const PineParams& params = state.pine;
  const PineShape& shape = params.shape;
  const int num_types = graph.num_types();
  const std::size_t n = graph.node_count();
  const std::size_t d = shape.dim;
  const int replicas = shape.replicas();
  require(shape.num_types == num_types,
          "aggregation network type count does not match graph");
  require(state.node_count() == n, "embedding table does not match graph");
  require(lambdas.size() == static_cast<std::size_t>(num_types),
          "need one reconstruction weight per node type");

  std::vector<double> weight(num_types);
  for (int k = 0; k < num_types; ++k) {
    require(lambdas[k] > 0.0 && std::isfinite(lambdas[k]),
            "reconstruction weights must be positive");
    if (graph.node_count(k) == 0)
      fail(ErrorCode::invalid_argument,
           "node type " + std::to_string(k) + " is empty");
    weight[k] = options.scale /
                (lambdas[k] * static_cast<double>(graph.node_count(k)));
  }

  std::vector<NodeId> all_targets;
  if (!options.targets) {
    all_targets.resize(n);
    for (std::size_t v = 0; v < n; ++v) all_targets[v] = static_cast<NodeId>(v);
  }
  const std::vector<NodeId>& targets =
      options.targets ? *options.targets : all_targets;

  // Nodes whose encoder output is needed, i.e. neighbors of some target.
  std::vector<std::uint8_t> needed(n, 0);
  {
    std::vector<NodeId> scratch;
    for (NodeId v : targets) {
      require(v < n, "target node out of range");
      for (int k = 0; k < num_types; ++k)
        for (NodeId u : capped_neighbors(graph, v, k, options, scratch))
          needed[u] = 1;
    }
  }
  std::vector<NodeId> encoded;
  for (std::size_t u = 0; u < n; ++u)
    if (needed[u]) encoded.push_back(static_cast<NodeId>(u));

  EncoderCache cache;
  cache.proj_offset.assign(n + 1, 0);
  cache.feat_offset.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    const int k = graph.type_of(static_cast<NodeId>(u));
    const std::size_t keep = needed[u] ? 1 : 0;
    cache.proj_offset[u + 1] =
        cache.proj_offset[u] + keep * replicas * shape.num_directions[k];
    cache.feat_offset[u + 1] =
        cache.feat_offset[u] + keep * replicas * shape.features(k);
  }
  cache.projection.assign(cache.proj_offset[n], 0.0);
  cache.features.assign(cache.feat_offset[n], 0.0);

  const int workers =
      std::max(1, std::min<int>(options.workers, static_cast<int>(
                                                     std::max<std::size_t>(targets.size(), 1))));

  // Encode every needed node once.
  detail::for_each_shard(workers, encoded.size(),
                         [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId u = encoded[i];
      const int k = graph.type_of(u);
      const std::size_t t_count = shape.num_directions[k];
      const std::size_t f_count = shape.features(k);
      for (int r = 0; r < replicas; ++r) {
        encode(params, r, k, state.row(u),
               {cache.projection.data() + cache.proj_offset[u] + r * t_count,
                t_count},
               {cache.features.data() + cache.feat_offset[u] + r * f_count,
                f_count});
      }
    }
  });

  // Target pass: pool neighbor features, run the outer layers, compare.
  struct WorkerAccum {
    double loss = 0.0;
    PineParams pine;
    std::vector<double> dfeatures;
  };
  std::vector<WorkerAccum> accum(workers);
  for (auto& a : accum) {
    if (grads) {
      a.pine = PineParams::zeros(shape);
      a.dfeatures.assign(cache.features.size(), 0.0);
    }
  }
  detail::for_each_shard(workers, targets.size(),
                         [&](int w, std::size_t begin, std::size_t end) {
    WorkerAccum& acc = accum[w];
    std::vector<NodeId> scratch;
    std::vector<double> pooled(shape.pooled_size());
    std::vector<double> dpooled(shape.pooled_size());
    std::vector<double> hidden(replicas * shape.num_hidden);
    std::vector<double> output(d);
    std::vector<double> upstream(d);
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId v = targets[i];
      std::fill(pooled.begin(), pooled.end(), 0.0);
      for (int k = 0; k < num_types; ++k) {
        const std::size_t f_count = shape.features(k);
        for (NodeId u : capped_neighbors(graph, v, k, options, scratch)) {
          for (int r = 0; r < replicas; ++r) {
            const double* src =
                cache.features.data() + cache.feat_offset[u] + r * f_count;
            double* dst = pooled.data() + shape.pooled_offset(r, k);
            for (std::size_t f = 0; f < f_count; ++f) dst[f] += src[f];
          }
        }
      }
      outer_forward(params, pooled, hidden, output);
      const double alpha = weight[graph.type_of(v)];
      const auto x = state.row(v);
      double err = 0.0;
      for (std::size_t m = 0; m < d; ++m) {
        const double res = x[m] - output[m];
        err += res * res;
        upstream[m] = -2.0 * alpha * res;
      }
      acc.loss += alpha * err;
      if (!grads) continue;

      auto dx = grads->row(v);
      for (std::size_t m = 0; m < d; ++m) dx[m] -= upstream[m];
      std::fill(dpooled.begin(), dpooled.end(), 0.0);
      outer_backward(params, pooled, hidden, upstream, acc.pine, dpooled);
      for (int k = 0; k < num_types; ++k) {
        const std::size_t f_count = shape.features(k);
        for (NodeId u : capped_neighbors(graph, v, k, options, scratch)) {
          for (int r = 0; r < replicas; ++r) {
            const double* src = dpooled.data() + shape.pooled_offset(r, k);
            double* dst =
                acc.dfeatures.data() + cache.feat_offset[u] + r * f_count;
            for (std::size_t f = 0; f < f_count; ++f) dst[f] += src[f];
          }
        }
      }
    }
  });

  double loss = 0.0;
  for (const auto& a : accum) loss += a.loss;
  if (!grads) return loss;

  for (int w = 1; w < workers; ++w) {
    accum[0].pine.add(accum[w].pine);
    auto& dst = accum[0].dfeatures;
    const auto& src = accum[w].dfeatures;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  grads->pine.add(accum[0].pine);
  const std::vector<double>& dfeatures = accum[0].dfeatures;

  // Neighbor role: push feature gradients back through each encoder.
  std::vector<PineParams> encoder_grads(workers);
  for (auto& g : encoder_grads) g = PineParams::zeros(shape);
  detail::for_each_shard(workers, encoded.size(),
                         [&](int w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId u = encoded[i];
      const int k = graph.type_of(u);
      const std::size_t t_count = shape.num_directions[k];
      const std::size_t f_count = shape.features(k);
      for (int r = 0; r < replicas; ++r) {
        const std::size_t fo = cache.feat_offset[u] + r * f_count;
        encode_backward(
            params, r, k, state.row(u),
            {cache.projection.data() + cache.proj_offset[u] + r * t_count,
             t_count},
            {cache.features.data() + fo, f_count},
            {dfeatures.data() + fo, f_count}, encoder_grads[w], grads->row(u));
      }
    }
  });
  for (const auto& g : encoder_grads) grads->pine.add(g);
  return loss;
}

namespace {

void check_head(const ModelState& state, const LabelTable& labels,
                std::span<const NodeId> labeled, LabelMode mode) {
  if (labels.mode != mode)
    fail(ErrorCode::invalid_argument,
         std::string("head expects ") + to_string(mode) + " labels");
  if (labeled.empty())
    fail(ErrorCode::invalid_argument, "labeled set is empty");
  require(labels.node_count() == state.node_count(),
          "label table does not match the embedding table");
  for (NodeId v : labeled) {
    require(v < state.node_count(), "labeled node out of range");
    if (!labels.has_label(v))
      fail(ErrorCode::invalid_argument,
           "node " + std::to_string(v) + " in labeled set has no label");
  }
  if (mode == LabelMode::multilabel &&
      labels.num_classes != state.head.num_classes())
    fail(ErrorCode::invalid_argument, "label count does not match head");
}

double head_regularization(const ModelState& state, double lambda_w,
                           ModelGradients* grads) {
  if (grads) {
    for (std::size_t i = 0; i < state.head.weights.size(); ++i)
      grads->head.weights[i] += 2.0 * lambda_w * state.head.weights[i];
  }
  return lambda_w * state.head.weights.squared_norm();
}

// Adds dlogits (length C) for node v into head and embedding gradients.
void backprop_logits(const ModelState& state, NodeId v,
                     std::span<const double> dlogits, ModelGradients& grads) {
  const std::size_t d = state.dim();
  const auto x = state.row(v);
  auto dx = grads.row(v);
  for (std::size_t i = 0; i < dlogits.size(); ++i) {
    const double g = dlogits[i];
    if (g == 0.0) continue;
    grads.head.bias[i] += g;
    const double* w = state.head.weights.data.data() + i * d;
    double* dw = grads.head.weights.data.data() + i * d;
    for (std::size_t m = 0; m < d; ++m) {
      dw[m] += g * x[m];
      dx[m] += g * w[m];
    }
  }
}

}  // namespace

std::vector<double> logits(const ModelState& state, NodeId v) {
  require(v < state.node_count(), "invalid node id " + std::to_string(v));
  const std::size_t d = state.dim();
  const auto c = static_cast<std::size_t>(state.head.num_classes());
  const auto x = state.row(v);
  std::vector<double> z(c);
  for (std::size_t i = 0; i < c; ++i)
    z[i] = state.head.bias[i] +
           dot({state.head.weights.data.data() + i * d, d}, x);
  return z;
}

HeadLoss softmax_head_loss(const ModelState& state, const LabelTable& labels,
                           std::span<const NodeId> labeled, double lambda_w,
                           ModelGradients* grads) {
  check_head(state, labels, labeled, LabelMode::multiclass);
  const int c = state.head.num_classes();
  const double inv = 1.0 / static_cast<double>(labeled.size());
  HeadLoss out;
  std::vector<double> dz(c);
  for (NodeId v : labeled) {
    const int y = labels.classes[v];
    if (y >= c)
      fail(ErrorCode::invalid_argument,
           "label " + std::to_string(y) + " exceeds class count " +
               std::to_string(c));
    const auto z = logits(state, v);
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double zi : z) sum += std::exp(zi - top);
    const double log_norm = top + std::log(sum);
    out.data += inv * (log_norm - z[y]);
    if (!grads) continue;
    for (int i = 0; i < c; ++i)
      dz[i] = inv * (std::exp(z[i] - log_norm) - (i == y ? 1.0 : 0.0));
    backprop_logits(state, v, dz, *grads);
  }
  out.regularization = head_regularization(state, lambda_w, grads);
  return out;
}

HeadLoss multilabel_head_loss(const ModelState& state, const LabelTable& labels,
                              std::span<const NodeId> labeled, double lambda_w,
                              ModelGradients* grads) {
  check_head(state, labels, labeled, LabelMode::multilabel);
  const int c = state.head.num_classes();
  const double inv = 1.0 / static_cast<double>(labeled.size());
  HeadLoss out;
  std::vector<double> dz(c);
  for (NodeId v : labeled) {
    const auto z = logits(state, v);
    for (int i = 0; i < c; ++i) {
      const double y = labels.indicators[v][i];
      // log(1 + e^z) without overflow.
      const double softplus =
          std::max(z[i], 0.0) + std::log1p(std::exp(-std::abs(z[i])));
      out.data += inv * (softplus - y * z[i]);
      dz[i] = inv * (1.0 / (1.0 + std::exp(-z[i])) - y);
    }
    if (grads) backprop_logits(state, v, dz, *grads);
  }
  out.regularization = head_regularization(state, lambda_w, grads);
  return out;
}

LossBreakdown total_objective(const ModelState& state, const HeteroGraph& graph,
                              const LabelTable* labels,
                              std::span<const NodeId> labeled,
                              const ObjectiveConfig& config,
                              ModelGradients* grads) {
  LossBreakdown out;
  out.reconstruction =
      reconstruction_loss(state, graph, config.lambdas, grads, config.recon);
  if (labels) {
    const HeadLoss head =
        labels->mode == LabelMode::multiclass
            ? softmax_head_loss(state, *labels, labeled, config.lambda_w, grads)
            : multilabel_head_loss(state, *labels, labeled, config.lambda_w,
                                   grads);
    out.supervised = head.data;
    out.regularization = head.regularization;
  }
  out.total = out.reconstruction + out.supervised + out.regularization;
  return out;
}

int predict_multiclass(const ModelState& state, NodeId v) {
  const auto z = logits(state, v);
  require(!z.empty(), "head has no classes");
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

std::vector<std::uint8_t> predict_multilabel(const ModelState& state, NodeId v,
                                             double threshold) {
  require(threshold > 0.0 && threshold < 1.0,
          "threshold must lie in (0,1)");
  const auto z = logits(state, v);
  std::vector<std::uint8_t> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = 1.0 / (1.0 + std::exp(-z[i])) >= threshold ? 1 : 0;
  return out;
}

}  // namespace pine
