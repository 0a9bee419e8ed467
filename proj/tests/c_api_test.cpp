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

// Exercises the shared library exclusively through its C header.

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "pine/pine.h"
#include "test_util.hpp"

using testing_util::read_file;
using testing_util::TempDir;
using testing_util::write_file;

namespace {

struct Planted {
  pine_graph* graph = nullptr;
  pine_labels* labels = nullptr;
  Planted() { EXPECT_EQ(pine_graph_planted(3, 8, 0.5, 0.05, 1, &graph, &labels), PINE_OK); }
  ~Planted() {
    pine_labels_free(labels);
    pine_graph_free(graph);
  }
};

pine_config* quick_config() {
  pine_config* c = pine_config_new();
  pine_config_set(c, "dim", "4");
  pine_config_set(c, "directions", "2");
  pine_config_set(c, "scales", "2");
  pine_config_set(c, "hidden", "2");
  pine_config_set(c, "epochs", "5");
  return c;
}

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(pine_status_name(PINE_OK), "ok");
  EXPECT_STREQ(pine_status_name(PINE_ERR_PARSE), "parse error");
  EXPECT_NE(std::string(pine_version()), "");
}

TEST(CApi, NullArgumentsRejected) {
  pine_graph* g = nullptr;
  EXPECT_EQ(pine_graph_load(nullptr, nullptr, &g), PINE_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(pine_last_error()).find("edge_path"), std::string::npos);
  EXPECT_EQ(pine_graph_node_count(nullptr), 0u);
  pine_graph_free(nullptr);
  pine_model_free(nullptr);
}

TEST(CApi, LoadErrorsMapToStatus) {
  TempDir dir;
  pine_graph* g = nullptr;
  EXPECT_EQ(pine_graph_load((dir / "absent").c_str(), nullptr, &g), PINE_ERR_IO);
  const auto bad = write_file(dir / "bad.tsv", "a\tb\nonly-one-field\n");
  EXPECT_EQ(pine_graph_load(bad.c_str(), nullptr, &g), PINE_ERR_PARSE);
  EXPECT_NE(std::string(pine_last_error()).find(":2:"), std::string::npos) << pine_last_error();
  EXPECT_EQ(g, nullptr);
}

TEST(CApi, GraphAndLabels) {
  TempDir dir;
  const auto edges = write_file(dir / "e.tsv", "a\tb\nb\tc\na\ta\n");
  pine_graph* g = nullptr;
  ASSERT_EQ(pine_graph_load(edges.c_str(), nullptr, &g), PINE_OK);
  EXPECT_EQ(pine_graph_node_count(g), 3u);
  EXPECT_EQ(pine_graph_edge_count(g), 2u);
  EXPECT_EQ(pine_graph_type_count(g), 1);
  ASSERT_EQ(pine_graph_warning_count(g), 1u);
  EXPECT_NE(std::string(pine_graph_warning(g, 0)).find("self-loop"), std::string::npos);
  EXPECT_EQ(pine_graph_warning(g, 5), nullptr);
  pine_labels* l = nullptr;
  const auto labels = write_file(dir / "l.tsv", "a\t0,2\n");
  ASSERT_EQ(pine_labels_load(labels.c_str(), g, PINE_MULTILABEL, &l), PINE_OK);
  EXPECT_EQ(pine_labels_class_count(l), 3);
  EXPECT_EQ(pine_labels_labeled_count(l), 1u);
  EXPECT_EQ(pine_labels_mode(l), PINE_MULTILABEL);
  pine_labels_free(l);
  pine_graph_free(g);
}

TEST(CApi, ConfigDescribe) {
  pine_config* c = pine_config_new();
  EXPECT_EQ(pine_config_set(c, "dim", "9"), PINE_OK);
  EXPECT_EQ(pine_config_set(c, "dim", "nine"), PINE_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pine_config_set(c, "colour", "red"), PINE_ERR_INVALID_ARGUMENT);
  size_t needed = 0;
  ASSERT_EQ(pine_config_describe(c, 1, PINE_MULTICLASS, nullptr, 0, &needed), PINE_OK);
  std::vector<char> buf(needed + 1);
  ASSERT_EQ(pine_config_describe(c, 1, PINE_MULTICLASS, buf.data(), buf.size(), &needed), PINE_OK);
  const std::string text(buf.data());
  EXPECT_EQ(text.size(), needed);
  EXPECT_NE(text.find("dim = 9"), std::string::npos);
  EXPECT_NE(text.find("lambda = 0.005"), std::string::npos);
  char tiny[4];
  ASSERT_EQ(pine_config_describe(c, 1, PINE_MULTICLASS, tiny, sizeof tiny, nullptr), PINE_OK);
  EXPECT_EQ(std::string(tiny).size(), 3u);
  pine_config_free(c);
}

TEST(CApi, TrainEvaluateSaveLoadExport) {
  TempDir dir;
  Planted p;
  pine_config* c = quick_config();
  pine_model* m = nullptr;
  ASSERT_EQ(pine_train(c, p.graph, p.labels, 0.5, &m), PINE_OK) << pine_last_error();
  EXPECT_EQ(pine_model_node_count(m), 24u);
  EXPECT_EQ(pine_model_dim(m), 4);
  double acc = -1;
  ASSERT_EQ(pine_model_evaluate(m, p.labels, "accuracy", &acc), PINE_OK);
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
  EXPECT_EQ(pine_model_evaluate(m, p.labels, "macro_f1", &acc), PINE_ERR_INVALID_ARGUMENT);

  const std::string ckpt = (dir / "m.ckpt").string();
  ASSERT_EQ(pine_model_save(m, ckpt.c_str()), PINE_OK);
  ASSERT_EQ(pine_model_write_history(m, (ckpt + ".history.csv").c_str()), PINE_OK);
  pine_model* back = nullptr;
  ASSERT_EQ(pine_model_load(ckpt.c_str(), &back), PINE_OK);
  std::vector<double> x(4), y(4);
  for (size_t v = 0; v < 24; ++v) {
    ASSERT_EQ(pine_model_embedding(m, v, x.data(), 4), PINE_OK);
    ASSERT_EQ(pine_model_embedding(back, v, y.data(), 4), PINE_OK);
    EXPECT_EQ(x, y);
  }
  EXPECT_EQ(pine_model_embedding(m, 24, x.data(), 4), PINE_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pine_model_embedding(m, 0, x.data(), 3), PINE_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pine_model_evaluate(back, p.labels, "accuracy", &acc), PINE_ERR_STATE);

  ASSERT_EQ(pine_model_export(back, p.graph, p.labels, (dir / "e.tsv").c_str()), PINE_OK);
  EXPECT_EQ(read_file(dir / "e.tsv").substr(0, 1), "#");
  pine_model_free(back);
  pine_model_free(m);
  pine_config_free(c);
}

TEST(CApi, UnsupervisedTrain) {
  Planted p;
  pine_config* c = quick_config();
  pine_model* m = nullptr;
  ASSERT_EQ(pine_train(c, p.graph, nullptr, 0.0, &m), PINE_OK) << pine_last_error();
  double v = 0;
  EXPECT_EQ(pine_model_evaluate(m, p.labels, "accuracy", &v), PINE_ERR_STATE);
  pine_model_free(m);
  pine_config_free(c);
}

TEST(CApi, BadRatio) {
  Planted p;
  pine_config* c = quick_config();
  pine_model* m = nullptr;
  EXPECT_EQ(pine_train(c, p.graph, p.labels, 1.5, &m), PINE_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(m, nullptr);
  pine_config_free(c);
}

TEST(CApi, SweepWritesReport) {
  TempDir dir;
  Planted p;
  pine_config* c = quick_config();
  const double ratios[] = {0.3, 0.6};
  int lines = 0;
  const std::string csv = (dir / "s.csv").string();
  ASSERT_EQ(pine_sweep(c, p.graph, p.labels, ratios, 2, 2, "toy", csv.c_str(),
                       [](const char*, void* user) { ++*static_cast<int*>(user); }, &lines),
            PINE_OK)
      << pine_last_error();
  EXPECT_GT(lines, 0);
  EXPECT_NE(read_file(csv).find("toy,0.3,accuracy"), std::string::npos);
  EXPECT_FALSE(read_file(csv + ".config").empty());
  pine_config_free(c);
}

TEST(CApi, SelfCheck) {
  std::vector<std::string> out;
  auto sink = [](const char* line, void* user) {
    static_cast<std::vector<std::string>*>(user)->push_back(line);
  };
  EXPECT_EQ(pine_self_check(50, 7, 0, sink, &out), PINE_OK);
  EXPECT_EQ(out.size(), 4u);
  for (const auto& line : out) EXPECT_EQ(line.rfind("PASS", 0), 0u) << line;
  out.clear();
  EXPECT_EQ(pine_self_check(50, 7, 1, sink, &out), PINE_ERR_CHECK_FAILED);
  EXPECT_EQ(out.front().rfind("FAIL partial permutation invariance", 0), 0u) << out.front();
  EXPECT_NE(out[1].find("replay: {"), std::string::npos);
  EXPECT_EQ(pine_self_check(0, 7, 0, sink, &out), PINE_ERR_INVALID_ARGUMENT);
}
