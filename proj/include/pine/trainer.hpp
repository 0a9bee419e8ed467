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

#ifndef PINE_TRAINER_HPP_
#define PINE_TRAINER_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pine/config.hpp"
#include "pine/graph.hpp"
#include "pine/model.hpp"
#include "pine/optim.hpp"

namespace pine {

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
  // Metric on the validation slice; NaN on epochs without evaluation.
  double validation = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  ModelState state;
  AdamState adam;
  // Row e holds the objective at the parameters reached after e epochs, for
  // e = 0..epochs.
  std::vector<EpochRecord> history;
  std::vector<NodeId> supervised;  // labeled nodes used by the head loss
  std::vector<NodeId> validation;  // labeled nodes held out for monitoring
};

// Joint ADAM optimization of embeddings, aggregation network and head.
// `labels` and `split` are both null for a purely unsupervised run. The
// config must already be resolved for the graph's type count.
TrainResult train(const TrainConfig& config, const HeteroGraph& graph,
                  const LabelTable* labels, const DataSplit* split);

void write_history_csv(const std::vector<EpochRecord>& history,
                       const std::filesystem::path& path);

// Metric name -> value on `nodes`: "accuracy" for multiclass labels,
// "macro_f1" and "micro_f1" for multilabel ones.
std::map<std::string, double> evaluate(const ModelState& state,
                                       const LabelTable& labels,
                                       std::span<const NodeId> nodes,
                                       double threshold = 0.5);

struct SweepRow {
  double ratio = 0.0;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one repeat
  int repeats = 0;
  std::vector<std::uint64_t> seeds;
};

struct SweepReport {
  std::string dataset;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  std::vector<SweepRow> rows;

  // dataset,ratio,metric,mean,std,repeats,seed0..seed{R-1}
  std::string csv() const;
};

// For every ratio and repeat r: split with seed config.seed + r, train with
// the same seed, evaluate on the held-out nodes.
SweepReport sweep(const TrainConfig& config, const HeteroGraph& graph,
                  const LabelTable& labels, std::span<const double> ratios,
                  int repeats, const std::string& dataset,
                  const std::function<void(const std::string&)>& progress = {});

// Writes the report CSV and a "<path>.config" key/value sidecar.
void write_sweep(const SweepReport& report, const TrainConfig& config,
                 const std::filesystem::path& path);

// TSV rows: id, type, true label or "_", predicted label(s) or "_", then the
// embedding at full double precision. First line is a '#' header.
void export_embeddings(const ModelState& state, const HeteroGraph& graph,
                       const LabelTable* labels, LabelMode mode,
                       const std::filesystem::path& path,
                       double threshold = 0.5);

}  // namespace pine

#endif  // PINE_TRAINER_HPP_
