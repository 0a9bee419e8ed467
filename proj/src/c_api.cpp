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

#include "pine/pine.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "pine/checkpoint.hpp"
#include "pine/config.hpp"
#include "pine/error.hpp"
#include "pine/graph.hpp"
#include "pine/selfcheck.hpp"
#include "pine/trainer.hpp"

struct pine_graph {
  pine::HeteroGraph graph;
  std::vector<std::string> warnings;
};

struct pine_labels {
  pine::LabelTable table;
};

struct pine_config {
  pine::ConfigOverrides overrides;
};

struct pine_model {
  pine::ModelState state;
  std::optional<pine::AdamState> adam;
  std::vector<pine::EpochRecord> history;
  std::vector<pine::NodeId> test;
  bool has_split = false;
  pine::LabelMode mode = pine::LabelMode::multiclass;
  std::map<std::string, std::string> meta;
  double threshold = 0.5;
};

namespace {

thread_local std::string last_error;

pine_status to_status(pine::ErrorCode code) {
  switch (code) {
    case pine::ErrorCode::invalid_argument: return PINE_ERR_INVALID_ARGUMENT;
    case pine::ErrorCode::parse: return PINE_ERR_PARSE;
    case pine::ErrorCode::io: return PINE_ERR_IO;
    case pine::ErrorCode::numeric: return PINE_ERR_NUMERIC;
    case pine::ErrorCode::state: return PINE_ERR_STATE;
  }
  return PINE_ERR_INTERNAL;
}

template <typename Fn>
pine_status guarded(Fn&& fn) {
  try {
    fn();
    return PINE_OK;
  } catch (const pine::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return PINE_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) pine::fail(pine::ErrorCode::invalid_argument,
                     std::string(what) + " must not be null");
}

pine::LabelMode to_mode(pine_label_mode mode) {
  if (mode == PINE_MULTICLASS) return pine::LabelMode::multiclass;
  if (mode == PINE_MULTILABEL) return pine::LabelMode::multilabel;
  pine::fail(pine::ErrorCode::invalid_argument, "unknown label mode");
}

pine::TrainConfig resolve(const pine_config* config, const pine_graph* graph,
                          const pine_labels* labels) {
  const pine::LabelMode mode =
      labels ? labels->table.mode : pine::LabelMode::multiclass;
  return config->overrides.resolve(graph->graph.num_types(), mode);
}

}  // namespace

extern "C" {

const char* pine_version(void) { return "1.0.0"; }

const char* pine_last_error(void) { return last_error.c_str(); }

const char* pine_status_name(pine_status status) {
  switch (status) {
    case PINE_OK: return "ok";
    case PINE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PINE_ERR_PARSE: return "parse error";
    case PINE_ERR_IO: return "i/o error";
    case PINE_ERR_NUMERIC: return "numeric error";
    case PINE_ERR_STATE: return "invalid state";
    case PINE_ERR_CHECK_FAILED: return "check failed";
    case PINE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

pine_status pine_graph_load(const char* edge_path, const char* type_path,
                            pine_graph** out) {
  return guarded([&] {
    need(edge_path, "edge_path");
    need(out, "out");
    auto handle = std::make_unique<pine_graph>();
    std::optional<std::filesystem::path> types;
    if (type_path) types = type_path;
    handle->graph = pine::load_graph(edge_path, types, &handle->warnings);
    *out = handle.release();
  });
}

pine_status pine_graph_planted(int communities, int community_size,
                               double p_in, double p_out, uint64_t seed,
                               pine_graph** graph, pine_labels** labels) {
  return guarded([&] {
    need(graph, "graph");
    need(labels, "labels");
    auto planted = pine::planted_partition(communities, community_size, p_in,
                                           p_out, seed);
    auto g = std::make_unique<pine_graph>();
    auto l = std::make_unique<pine_labels>();
    g->graph = std::move(planted.graph);
    l->table = std::move(planted.labels);
    *graph = g.release();
    *labels = l.release();
  });
}

pine_status pine_graph_save(const pine_graph* graph, const char* edge_path,
                            const char* type_path) {
  return guarded([&] {
    need(graph, "graph");
    need(edge_path, "edge_path");
    need(type_path, "type_path");
    pine::save_graph(graph->graph, edge_path, type_path);
  });
}

size_t pine_graph_node_count(const pine_graph* graph) {
  return graph ? graph->graph.node_count() : 0;
}

size_t pine_graph_edge_count(const pine_graph* graph) {
  return graph ? graph->graph.edge_count() : 0;
}

int pine_graph_type_count(const pine_graph* graph) {
  return graph ? graph->graph.num_types() : 0;
}

size_t pine_graph_warning_count(const pine_graph* graph) {
  return graph ? graph->warnings.size() : 0;
}

const char* pine_graph_warning(const pine_graph* graph, size_t index) {
  if (!graph || index >= graph->warnings.size()) return nullptr;
  return graph->warnings[index].c_str();
}

void pine_graph_free(pine_graph* graph) { delete graph; }

pine_status pine_labels_load(const char* path, const pine_graph* graph,
                             pine_label_mode mode, pine_labels** out) {
  return guarded([&] {
    need(path, "path");
    need(graph, "graph");
    need(out, "out");
    auto handle = std::make_unique<pine_labels>();
    handle->table = pine::load_labels(path, graph->graph, to_mode(mode));
    *out = handle.release();
  });
}

pine_status pine_labels_save(const pine_labels* labels, const pine_graph* graph,
                             const char* path) {
  return guarded([&] {
    need(labels, "labels");
    need(graph, "graph");
    need(path, "path");
    pine::save_labels(labels->table, graph->graph, path);
  });
}

int pine_labels_class_count(const pine_labels* labels) {
  return labels ? labels->table.num_classes : 0;
}

size_t pine_labels_labeled_count(const pine_labels* labels) {
  return labels ? labels->table.labeled_nodes().size() : 0;
}

pine_label_mode pine_labels_mode(const pine_labels* labels) {
  return labels && labels->table.mode == pine::LabelMode::multilabel
             ? PINE_MULTILABEL
             : PINE_MULTICLASS;
}

void pine_labels_free(pine_labels* labels) { delete labels; }

pine_config* pine_config_new(void) { return new (std::nothrow) pine_config(); }

pine_status pine_config_set(pine_config* config, const char* key,
                            const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->overrides.set(key, value);
  });
}

pine_status pine_config_load_file(pine_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    config->overrides.load_file(path);
  });
}

pine_status pine_config_describe(const pine_config* config, int num_types,
                                 pine_label_mode mode, char* buf,
                                 size_t capacity, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    const std::string text =
        config->overrides.resolve(num_types, to_mode(mode)).to_text();
    if (needed) *needed = text.size();
    if (buf && capacity > 0) {
      const std::size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

void pine_config_free(pine_config* config) { delete config; }

pine_status pine_train(const pine_config* config, const pine_graph* graph,
                       const pine_labels* labels, double labeled_ratio,
                       pine_model** out) {
  return guarded([&] {
    need(config, "config");
    need(graph, "graph");
    need(out, "out");
    const pine::TrainConfig resolved = resolve(config, graph, labels);
    auto model = std::make_unique<pine_model>();
    pine::TrainResult result;
    if (labels) {
      const pine::DataSplit split = pine::make_split(
          graph->graph, labels->table, labeled_ratio, resolved.seed);
      result = pine::train(resolved, graph->graph, &labels->table, &split);
      model->test = split.test;
      model->has_split = true;
      model->mode = labels->table.mode;
      char ratio[32];
      std::snprintf(ratio, sizeof ratio, "%.17g", labeled_ratio);
      model->meta["labeled_ratio"] = ratio;
    } else {
      result = pine::train(resolved, graph->graph, nullptr, nullptr);
    }
    model->state = std::move(result.state);
    model->adam = std::move(result.adam);
    model->history = std::move(result.history);
    model->threshold = resolved.threshold;
    model->meta["label_mode"] = pine::to_string(model->mode);
    for (const auto& [k, v] : resolved.items()) model->meta["config." + k] = v;
    *out = model.release();
  });
}

pine_status pine_model_evaluate(const pine_model* model,
                                const pine_labels* labels, const char* metric,
                                double* value) {
  return guarded([&] {
    need(model, "model");
    need(labels, "labels");
    need(metric, "metric");
    need(value, "value");
    if (!model->has_split)
      pine::fail(pine::ErrorCode::state, "model carries no test split");
    const auto metrics = pine::evaluate(model->state, labels->table,
                                        model->test, model->threshold);
    auto it = metrics.find(metric);
    if (it == metrics.end())
      pine::fail(pine::ErrorCode::invalid_argument,
                 std::string("metric '") + metric +
                     "' not available for this label mode");
    *value = it->second;
  });
}

pine_status pine_model_save(const pine_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    pine::save_checkpoint(path, model->state,
                          model->adam ? &*model->adam : nullptr, model->meta);
  });
}

pine_status pine_model_load(const char* path, pine_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    pine::Checkpoint ck = pine::load_checkpoint(path);
    auto model = std::make_unique<pine_model>();
    model->state = std::move(ck.state);
    model->adam = std::move(ck.adam);
    model->meta = std::move(ck.meta);
    auto mode = model->meta.find("label_mode");
    if (mode != model->meta.end())
      model->mode = pine::parse_label_mode(mode->second);
    auto threshold = model->meta.find("config.threshold");
    if (threshold != model->meta.end())
      model->threshold = std::stod(threshold->second);
    *out = model.release();
  });
}

pine_status pine_model_write_history(const pine_model* model,
                                     const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    pine::write_history_csv(model->history, path);
  });
}

size_t pine_model_node_count(const pine_model* model) {
  return model ? model->state.node_count() : 0;
}

int pine_model_dim(const pine_model* model) {
  return model ? model->state.dim() : 0;
}

pine_status pine_model_embedding(const pine_model* model, size_t node,
                                 double* out, size_t length) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    if (node >= model->state.node_count())
      pine::fail(pine::ErrorCode::invalid_argument, "node out of range");
    if (length != static_cast<std::size_t>(model->state.dim()))
      pine::fail(pine::ErrorCode::invalid_argument, "buffer length != dim");
    auto row = model->state.row(static_cast<pine::NodeId>(node));
    std::copy(row.begin(), row.end(), out);
  });
}

pine_status pine_model_export(const pine_model* model, const pine_graph* graph,
                              const pine_labels* labels, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(graph, "graph");
    need(path, "path");
    pine::export_embeddings(model->state, graph->graph,
                            labels ? &labels->table : nullptr,
                            labels ? labels->table.mode : model->mode, path,
                            model->threshold);
  });
}

void pine_model_free(pine_model* model) { delete model; }

pine_status pine_sweep(const pine_config* config, const pine_graph* graph,
                       const pine_labels* labels, const double* ratios,
                       size_t ratio_count, int repeats, const char* dataset,
                       const char* csv_path, pine_line_fn progress,
                       void* user) {
  return guarded([&] {
    need(config, "config");
    need(graph, "graph");
    need(labels, "labels");
    need(ratios, "ratios");
    need(csv_path, "csv_path");
    const pine::TrainConfig resolved = resolve(config, graph, labels);
    std::function<void(const std::string&)> report;
    if (progress) report = [&](const std::string& line) { progress(line.c_str(), user); };
    const pine::SweepReport result = pine::sweep(
        resolved, graph->graph, labels->table, {ratios, ratio_count}, repeats,
        dataset ? dataset : "dataset", report);
    pine::write_sweep(result, resolved, csv_path);
  });
}

pine_status pine_self_check(int trials, uint64_t seed, int corrupt_symmetry,
                            pine_line_fn sink, void* user) {
  bool all_passed = true;
  const pine_status status = guarded([&] {
    if (trials < 1)
      pine::fail(pine::ErrorCode::invalid_argument, "trials must be positive");
    pine::CheckOptions options;
    options.trials = trials;
    options.seed = seed;
    options.corrupt_symmetry = corrupt_symmetry != 0;
    for (const auto& line : pine::run_self_checks(options)) {
      all_passed = all_passed && line.passed;
      if (!sink) continue;
      std::string text =
          std::string(line.passed ? "PASS " : "FAIL ") + line.name + ": " +
          line.detail;
      sink(text.c_str(), user);
      if (!line.replay.empty()) {
        text = "  replay: " + line.replay;
        sink(text.c_str(), user);
      }
    }
  });
  if (status != PINE_OK) return status;
  if (!all_passed) {
    last_error = "one or more properties failed";
    return PINE_ERR_CHECK_FAILED;
  }
  return PINE_OK;
}

}  // extern "C"
