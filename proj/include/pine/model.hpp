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

#ifndef PINE_MODEL_HPP_
#define PINE_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pine/graph.hpp"
#include "pine/setfn.hpp"
#include "pine/tensor.hpp"

namespace pine {

struct HeadParams {
  Tensor weights;  // [C, d]
  Tensor bias;     // [C]

  int num_classes() const { return static_cast<int>(bias.size()); }
};

// Everything optimized jointly: node embeddings, the shared aggregation
// network and the classifier head. The same layout carries gradients.
struct ModelState {
  Tensor embeddings;  // [n, d]
  PineParams pine;
  HeadParams head;

  std::size_t node_count() const { return embeddings.shape.at(0); }
  int dim() const { return pine.shape.dim; }
  std::span<double> row(NodeId v) {
    return {embeddings.data.data() + static_cast<std::size_t>(v) * dim(),
            static_cast<std::size_t>(dim())};
  }
  std::span<const double> row(NodeId v) const {
    return {embeddings.data.data() + static_cast<std::size_t>(v) * dim(),
            static_cast<std::size_t>(dim())};
  }

  ModelState zeros_like() const;
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  void validate() const;
};

using ModelGradients = ModelState;

// Embeddings and head weights ~ U(-init_scale, init_scale) (init_scale <= 0
// selects 1/sqrt(d)); head bias zero; aggregation network per init_params.
// Each member draws from its own named sub-stream of `seed`.
ModelState init_model(const PineShape& shape, std::size_t node_count,
                      int num_classes, std::uint64_t seed,
                      double init_scale = 0.0);

struct LossBreakdown {
  double reconstruction = 0.0;
  double supervised = 0.0;
  double regularization = 0.0;
  double total = 0.0;
};

struct ReconOptions {
  int workers = 1;
  // Neighbor lists longer than this are replaced by a seeded uniform
  // subsample of this size; 0 keeps every neighbor.
  std::size_t neighbor_cap = 0;
  std::uint64_t sample_seed = 0;
  // Target nodes; null means every node.
  const std::vector<NodeId>* targets = nullptr;
  // Multiplies the loss and its gradients (minibatch reweighting).
  double scale = 1.0;
};

// sum_k 1/(lambda_k |V_k|) sum_{v in V_k} ||x_v - f(neighbors of v)||^2.
// Gradients (when `grads` is non-null) are added into it: every embedding
// receives its target-role and neighbor-role contributions.
double reconstruction_loss(const ModelState& state, const HeteroGraph& graph,
                           std::span<const double> lambdas,
                           ModelGradients* grads,
                           const ReconOptions& options = {});

struct HeadLoss {
  double data = 0.0;
  double regularization = 0.0;
  double total() const { return data + regularization; }
};

// Mean softmax cross-entropy over `labeled` plus lambda_w * ||W||_F^2.
HeadLoss softmax_head_loss(const ModelState& state, const LabelTable& labels,
                           std::span<const NodeId> labeled, double lambda_w,
                           ModelGradients* grads);

// Mean over `labeled` of the per-label logistic losses
// log(1 + exp(z_i)) - y_i z_i, plus lambda_w * ||W||_F^2.
HeadLoss multilabel_head_loss(const ModelState& state, const LabelTable& labels,
                              std::span<const NodeId> labeled, double lambda_w,
                              ModelGradients* grads);

struct ObjectiveConfig {
  std::vector<double> lambdas;  // one per node type
  double lambda_w = 1e-3;
  ReconOptions recon;
};

// Reconstruction plus, when labels are given, the head matching their mode.
LossBreakdown total_objective(const ModelState& state, const HeteroGraph& graph,
                              const LabelTable* labels,
                              std::span<const NodeId> labeled,
                              const ObjectiveConfig& config,
                              ModelGradients* grads);

std::vector<double> logits(const ModelState& state, NodeId v);

// argmax of the logits, lowest index on ties.
int predict_multiclass(const ModelState& state, NodeId v);

// Label i is set iff logistic(logit_i) >= threshold.
std::vector<std::uint8_t> predict_multilabel(const ModelState& state, NodeId v,
                                             double threshold = 0.5);

}  // namespace pine

#endif  // PINE_MODEL_HPP_
