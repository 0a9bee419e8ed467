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

#include "pine/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pine/error.hpp"
#include "pine/metrics.hpp"
#include "pine/rng.hpp"

namespace pine {
namespace {

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.reconstruction) && std::isfinite(l.supervised) &&
         std::isfinite(l.regularization) && std::isfinite(l.total);
}

// Metric watched on the validation slice.
double validation_metric(const ModelState& state, const LabelTable& labels,
                         std::span<const NodeId> nodes, double threshold) {
  const auto m = evaluate(state, labels, nodes, threshold);
  return labels.mode == LabelMode::multiclass ? m.at("accuracy")
                                              : m.at("micro_f1");
}

}  // namespace

TrainResult train(const TrainConfig& config, const HeteroGraph& graph,
                  const LabelTable* labels, const DataSplit* split) {
  const int num_types = graph.num_types();
  config.validate(num_types);
  require((labels == nullptr) == (split == nullptr),
          "labels and split must be given together");
  const std::size_t n = graph.node_count();
  require(n > 0, "graph has no nodes");

  TrainResult result;
  int num_classes = 0;
  if (labels) {
    require(labels->node_count() == n, "label table does not match graph");
    require(!split->labeled.empty(), "split has no labeled nodes");
    num_classes = labels->num_classes;

    // Hold a deterministic slice of the labeled nodes out for monitoring,
    // always keeping at least one for the head.
    std::vector<NodeId> pool = split->labeled;
    auto held = static_cast<std::size_t>(
        std::floor(config.validation_fraction * pool.size() + 0.5));
    held = std::min(held, pool.size() - 1);
    Rng rng(derive_seed(split->seed, "validation"));
    for (std::size_t i = pool.size(); i > 1; --i)
      std::swap(pool[i - 1], pool[rng.below(i)]);
    result.validation.assign(pool.begin(), pool.begin() + held);
    result.supervised.assign(pool.begin() + held, pool.end());
    std::sort(result.validation.begin(), result.validation.end());
    std::sort(result.supervised.begin(), result.supervised.end());
  }

  result.state = init_model(config.pine_shape(num_types), n, num_classes,
                            config.seed, config.init_scale);
  ModelState& state = result.state;
  result.adam.hyper = config.adam;
  result.adam.reset(state.tensors());

  const bool full_batch =
      config.batch == BatchMode::full ||
      (config.batch == BatchMode::automatic && n <= config.full_batch_limit);
  const std::size_t batch_size =
      full_batch ? n : std::min<std::size_t>(config.batch_size, n);

  ObjectiveConfig objective;
  objective.lambdas = config.lambdas;
  objective.lambda_w = config.lambda_w;
  objective.recon.workers = config.workers;
  objective.recon.neighbor_cap = config.neighbor_cap;

  auto diverged = [](int epoch, const std::string& why) {
    fail(ErrorCode::numeric,
         "training diverged at epoch " + std::to_string(epoch) + ": " + why);
  };
  auto full_loss = [&](int epoch, ModelGradients* grads) {
    objective.recon.sample_seed = derive_seed(config.seed, "sampling", epoch);
    objective.recon.targets = nullptr;
    objective.recon.scale = 1.0;
    auto loss = total_objective(state, graph, labels, result.supervised,
                                objective, grads);
    if (!finite(loss)) diverged(epoch, "objective is not finite");
    return loss;
  };
  auto record = [&](int epoch, const LossBreakdown& loss) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    if (labels && !result.validation.empty() &&
        (epoch % config.eval_every == 0 || epoch == config.epochs)) {
      rec.validation = validation_metric(state, *labels, result.validation,
                                         config.threshold);
      if (!std::isfinite(rec.validation))
        diverged(epoch, "validation metric is not finite");
    }
    result.history.push_back(rec);
  };

  std::vector<NodeId> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = static_cast<NodeId>(v);
  std::vector<std::uint8_t> supervised_mask(n, 0);
  for (NodeId v : result.supervised) supervised_mask[v] = 1;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (full_batch) {
      ModelGradients grads = state.zeros_like();
      record(epoch, full_loss(epoch, &grads));
      try {
        adam_step(result.adam, state.tensors(), grads.tensors());
      } catch (const Error& e) {
        diverged(epoch, e.what());
      }
      continue;
    }

    record(epoch, full_loss(epoch, nullptr));
    Rng rng(derive_seed(config.seed, "batches", epoch));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(n, start + batch_size);
      std::vector<NodeId> batch(order.begin() + start, order.begin() + stop);
      std::sort(batch.begin(), batch.end());
      std::vector<NodeId> batch_labeled;
      for (NodeId v : batch)
        if (supervised_mask[v]) batch_labeled.push_back(v);

      objective.recon.sample_seed =
          derive_seed(config.seed, "sampling", epoch);
      objective.recon.targets = &batch;
      objective.recon.scale =
          static_cast<double>(n) / static_cast<double>(batch.size());
      ModelGradients grads = state.zeros_like();
      const LabelTable* batch_labels = batch_labeled.empty() ? nullptr : labels;
      const auto loss = total_objective(state, graph, batch_labels,
                                        batch_labeled, objective, &grads);
      if (!finite(loss)) diverged(epoch, "minibatch objective is not finite");
      try {
        adam_step(result.adam, state.tensors(), grads.tensors());
      } catch (const Error& e) {
        diverged(epoch, e.what());
      }
    }
  }
  record(config.epochs, full_loss(config.epochs, nullptr));
  return result;
}

void write_history_csv(const std::vector<EpochRecord>& history,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "epoch,reconstruction,supervised,regularization,total,validation\n";
  char buf[256];
  for (const auto& rec : history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,", rec.epoch,
                  rec.loss.reconstruction, rec.loss.supervised,
                  rec.loss.regularization, rec.loss.total);
    out << buf;
    if (std::isfinite(rec.validation)) {
      std::snprintf(buf, sizeof buf, "%.17g", rec.validation);
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

std::map<std::string, double> evaluate(const ModelState& state,
                                       const LabelTable& labels,
                                       std::span<const NodeId> nodes,
                                       double threshold) {
  std::map<std::string, double> out;
  if (labels.mode == LabelMode::multiclass) {
    std::map<NodeId, int> predicted, truth;
    for (NodeId v : nodes) {
      predicted[v] = predict_multiclass(state, v);
      truth[v] = labels.classes.at(v);
    }
    out["accuracy"] = accuracy(predicted, truth);
  } else {
    if (nodes.empty()) fail(ErrorCode::invalid_argument, "empty test set");
    std::vector<std::vector<std::uint8_t>> predicted, truth;
    for (NodeId v : nodes) {
      predicted.push_back(predict_multilabel(state, v, threshold));
      truth.push_back(labels.indicators.at(v));
    }
    const F1Scores f1 = f1_scores(predicted, truth, labels.num_classes);
    out["macro_f1"] = f1.macro;
    out["micro_f1"] = f1.micro;
  }
  return out;
}

std::string SweepReport::csv() const {
  std::size_t max_seeds = 0;
  for (const auto& row : rows) max_seeds = std::max(max_seeds, row.seeds.size());
  std::ostringstream out;
  out << "dataset,ratio,metric,mean,std,repeats";
  for (std::size_t i = 0; i < max_seeds; ++i) out << ",seed" << i;
  out << '\n';
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%s,%.17g,%.17g,%d", row.ratio,
                  row.metric.c_str(), row.mean, row.stddev, row.repeats);
    out << dataset << ',' << buf;
    for (std::size_t i = 0; i < max_seeds; ++i) {
      out << ',';
      if (i < row.seeds.size()) out << row.seeds[i];
    }
    out << '\n';
  }
  return out.str();
}

SweepReport sweep(const TrainConfig& config, const HeteroGraph& graph,
                  const LabelTable& labels, std::span<const double> ratios,
                  int repeats, const std::string& dataset,
                  const std::function<void(const std::string&)>& progress) {
  require(repeats >= 1, "repeats must be at least 1");
  require(!ratios.empty(), "no label ratios given");
  for (double r : ratios)
    require(r > 0.0 && r < 1.0, "label ratios must lie in (0,1)");

  const auto started = std::chrono::steady_clock::now();
  SweepReport report;
  report.dataset = dataset;
  report.config_hash = config.hash();
  for (double ratio : ratios) {
    std::map<std::string, std::vector<double>> values;
    std::vector<std::uint64_t> seeds;
    for (int rep = 0; rep < repeats; ++rep) {
      TrainConfig run = config;
      run.seed = config.seed + static_cast<std::uint64_t>(rep);
      seeds.push_back(run.seed);
      try {
        const DataSplit split = make_split(graph, labels, ratio, run.seed);
        const TrainResult trained = train(run, graph, &labels, &split);
        for (const auto& [name, value] :
             evaluate(trained.state, labels, split.test, run.threshold))
          values[name].push_back(value);
      } catch (const Error& e) {
        char ctx[96];
        std::snprintf(ctx, sizeof ctx, "sweep ratio %.6g repeat %d: ", ratio, rep);
        fail(e.code(), ctx + std::string(e.what()));
      }
      if (progress) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "ratio %.6g repeat %d/%d done", ratio,
                      rep + 1, repeats);
        progress(msg);
      }
    }
    for (const auto& [name, v] : values) {
      SweepRow row;
      row.ratio = ratio;
      row.metric = name;
      row.repeats = static_cast<int>(v.size());
      row.seeds = seeds;
      for (double x : v) row.mean += x;
      row.mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - row.mean) * (x - row.mean);
      row.stddev = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
      report.rows.push_back(std::move(row));
    }
  }
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  return report;
}

void write_sweep(const SweepReport& report, const TrainConfig& config,
                 const std::filesystem::path& path) {
  {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << report.csv();
    if (!out) fail(ErrorCode::io, "failed writing " + path.string());
  }
  std::filesystem::path sidecar = path;
  sidecar += ".config";
  std::ofstream out(sidecar);
  if (!out) fail(ErrorCode::io, "cannot write " + sidecar.string());
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(report.config_hash));
  out << "dataset = " << report.dataset << "\n"
      << "config_hash = " << hash << "\n"
      << config.to_text();
  if (!out) fail(ErrorCode::io, "failed writing " + sidecar.string());
}

void export_embeddings(const ModelState& state, const HeteroGraph& graph,
                       const LabelTable* labels, LabelMode mode,
                       const std::filesystem::path& path, double threshold) {
  require(state.node_count() == graph.node_count(),
          "checkpoint has " + std::to_string(state.node_count()) +
              " nodes but graph has " + std::to_string(graph.node_count()));
  if (labels)
    require(labels->node_count() == graph.node_count(),
            "label table does not match graph");
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  const int d = state.dim();
  out << "#id\ttype\ttrue\tpredicted";
  for (int m = 0; m < d; ++m) out << "\te" << m;
  out << '\n';
  char buf[32];
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    out << graph.name(v) << '\t' << graph.type_of(v) << '\t'
        << (labels ? labels->label_text(v) : std::string("_")) << '\t';
    if (state.head.num_classes() == 0) {
      out << '_';
    } else if (mode == LabelMode::multiclass) {
      out << predict_multiclass(state, v);
    } else {
      const auto bits = predict_multilabel(state, v, threshold);
      std::string text;
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        if (!text.empty()) text += ',';
        text += std::to_string(i);
      }
      out << (text.empty() ? "_" : text);
    }
    for (double x : state.row(v)) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << '\t' << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

}  // namespace pine
