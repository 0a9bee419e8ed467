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

// Command-line driver. Talks to the library only through pine.h.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pine/pine.h"

namespace {

struct Failure {
  std::string message;
};

void check(pine_status status, const std::string& context) {
  if (status == PINE_OK) return;
  throw Failure{context + ": " + pine_last_error()};
}

struct Flags {
  std::string edges, types, labels, mode = "multiclass", out, checkpoint;
  std::string config_file, ratios = "0.1:0.9:0.1";
  double ratio = 0.5;
  int repeats = 5, trials = 1000;
  int dim = 0, epochs = -1, workers = 0;
  uint64_t seed = 1;
  bool seed_given = false, corrupt = false;
};

// Owning wrappers so early exits release library handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
};
using Graph = Handle<pine_graph, pine_graph_free>;
using Labels = Handle<pine_labels, pine_labels_free>;
using Config = Handle<pine_config, pine_config_free>;
using Model = Handle<pine_model, pine_model_free>;

pine_label_mode parse_mode(const std::string& mode) {
  return mode == "multilabel" ? PINE_MULTILABEL : PINE_MULTICLASS;
}

void load_graph(const Flags& f, Graph& graph) {
  check(pine_graph_load(f.edges.c_str(),
                        f.types.empty() ? nullptr : f.types.c_str(),
                        &graph.ptr),
        "loading graph");
  for (size_t i = 0; i < pine_graph_warning_count(graph.ptr); ++i)
    std::fprintf(stderr, "warning: %s\n", pine_graph_warning(graph.ptr, i));
}

void load_labels(const Flags& f, const Graph& graph, Labels& labels) {
  if (f.labels.empty()) return;
  check(pine_labels_load(f.labels.c_str(), graph.ptr, parse_mode(f.mode),
                         &labels.ptr),
        "loading labels");
}

// Config file first, then explicit flags on top.
void build_config(const Flags& f, Config& config) {
  config.ptr = pine_config_new();
  if (!config.ptr) throw Failure{"out of memory"};
  if (!f.config_file.empty())
    check(pine_config_load_file(config.ptr, f.config_file.c_str()),
          "reading config");
  auto set = [&](const char* key, const std::string& value) {
    check(pine_config_set(config.ptr, key, value.c_str()),
          std::string("--") + key);
  };
  if (f.dim > 0) set("dim", std::to_string(f.dim));
  if (f.epochs >= 0) set("epochs", std::to_string(f.epochs));
  if (f.workers > 0) set("workers", std::to_string(f.workers));
  if (f.seed_given) set("seed", std::to_string(f.seed));
}

std::vector<double> parse_ratios(const std::string& text) {
  double lo = 0, hi = 0, step = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3 ||
      !(step > 0) || !(lo > 0) || !(hi < 1) || hi < lo)
    throw CLI::ValidationError("--ratios",
                               "expected lo:hi:step with 0 < lo <= hi < 1");
  const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> ratios;
  for (int i = 0; i < count; ++i)
    ratios.push_back(std::round((lo + i * step) * 1e12) / 1e12);
  return ratios;
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

int cmd_train(const Flags& f) {
  Graph graph;
  Labels labels;
  Config config;
  load_graph(f, graph);
  load_labels(f, graph, labels);
  build_config(f, config);
  Model model;
  check(pine_train(config.ptr, graph.ptr, labels.ptr, f.ratio, &model.ptr),
        "training");
  check(pine_model_save(model.ptr, f.out.c_str()), "writing checkpoint");
  check(pine_model_write_history(model.ptr, (f.out + ".history.csv").c_str()),
        "writing history");
  if (labels.ptr) {
    const bool multilabel = pine_labels_mode(labels.ptr) == PINE_MULTILABEL;
    for (const char* metric : multilabel
                                  ? std::vector<const char*>{"macro_f1", "micro_f1"}
                                  : std::vector<const char*>{"accuracy"}) {
      double value = 0;
      check(pine_model_evaluate(model.ptr, labels.ptr, metric, &value),
            "evaluating");
      std::printf("%s %.6f\n", metric, value);
    }
  }
  std::printf("checkpoint %s\n", f.out.c_str());
  return 0;
}

int cmd_sweep(const Flags& f, const std::vector<double>& ratios) {
  Graph graph;
  Labels labels;
  Config config;
  load_graph(f, graph);
  if (f.labels.empty()) throw Failure{"sweep needs --labels"};
  load_labels(f, graph, labels);
  build_config(f, config);
  const std::string dataset = std::filesystem::path(f.edges).stem().string();
  check(pine_sweep(config.ptr, graph.ptr, labels.ptr, ratios.data(),
                   ratios.size(), f.repeats, dataset.c_str(), f.out.c_str(),
                   print_line, nullptr),
        "sweep");
  std::printf("report %s\n", f.out.c_str());
  return 0;
}

int cmd_check(const Flags& f) {
  const pine_status status = pine_self_check(
      f.trials, f.seed_given ? f.seed : 7, f.corrupt ? 1 : 0, print_line,
      nullptr);
  if (status == PINE_ERR_CHECK_FAILED) return 1;
  check(status, "check");
  std::printf("all properties passed\n");
  return 0;
}

int cmd_export(const Flags& f) {
  Graph graph;
  Labels labels;
  Model model;
  load_graph(f, graph);
  load_labels(f, graph, labels);
  check(pine_model_load(f.checkpoint.c_str(), &model.ptr), "reading checkpoint");
  check(pine_model_export(model.ptr, graph.ptr, labels.ptr, f.out.c_str()),
        "exporting");
  std::printf("embeddings %s\n", f.out.c_str());
  return 0;
}

void add_data_flags(CLI::App* cmd, Flags& f, bool edges_required) {
  auto* edges = cmd->add_option("--edges", f.edges, "Edge list (TSV, one edge per row)")
                    ->check(CLI::ExistingFile);
  if (edges_required) edges->required();
  cmd->add_option("--types", f.types, "Node type file (TSV: node, type index)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--labels", f.labels, "Label file (TSV: node, label[,label...])")
      ->check(CLI::ExistingFile);
  cmd->add_option("--mode", f.mode, "Label mode")
      ->check(CLI::IsMember({"multiclass", "multilabel"}))
      ->capture_default_str();
}

void add_train_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "Config file of key = value lines")
      ->check(CLI::ExistingFile);
  cmd->add_option("--dim", f.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--workers", f.workers, "Gradient worker threads (default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Base random seed")
      ->each([&f](const std::string&) { f.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially permutation invariant network embedding"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Flags f;
  std::vector<double> ratios;

  auto* train = app.add_subcommand("train", "Train embeddings and write a checkpoint");
  add_data_flags(train, f, true);
  add_train_flags(train, f);
  train->add_option("--ratio", f.ratio, "Fraction of labeled nodes used for supervision")
      ->check(CLI::Range(0.0, 1.0).description("(0,1)"))
      ->capture_default_str();
  train->add_option("--out", f.out, "Checkpoint path")->required();

  auto* sweep = app.add_subcommand("sweep", "Accuracy / F1 across labeled ratios");
  add_data_flags(sweep, f, true);
  add_train_flags(sweep, f);
  sweep->add_option("--ratios", f.ratios, "Ratio grid lo:hi:step")->capture_default_str();
  sweep->add_option("--repeats", f.repeats, "Repeats per ratio")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--out", f.out, "Report CSV path")->required();

  auto* self = app.add_subcommand("check", "Randomized property checks");
  self->add_option("--trials", f.trials, "Invariance trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  self->add_option("--seed", f.seed, "Random seed (default 7)")
      ->each([&f](const std::string&) { f.seed_given = true; });
  self->add_flag("--corrupt-symmetry", f.corrupt,
                 "Negative control: break within-type symmetry")
      ->group("");

  auto* exp = app.add_subcommand("export", "Write embeddings as TSV");
  add_data_flags(exp, f, true);
  exp->add_option("--checkpoint", f.checkpoint, "Checkpoint from train")->required();
  exp->add_option("--out", f.out, "TSV path")->required();

  try {
    app.parse(argc, argv);
    if (sweep->parsed()) ratios = parse_ratios(f.ratios);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return cmd_train(f);
    if (sweep->parsed()) return cmd_sweep(f, ratios);
    if (self->parsed()) return cmd_check(f);
    return cmd_export(f);
  } catch (const Failure& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return 1;
  }
}
