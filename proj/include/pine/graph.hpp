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

#ifndef PINE_GRAPH_HPP_
#define PINE_GRAPH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pine {

using NodeId = std::uint32_t;

// Typed undirected graph. Node ids are dense in [0, node_count()); every node
// carries one type in [0, num_types()) and, per neighbor type, a sorted
// duplicate-free neighbor list. Immutable once built.
class HeteroGraph {
 public:
  HeteroGraph() = default;

  // Builds the graph from raw edges. Edges are symmetrized, duplicates
  // collapse, self-loops are dropped (one warning each when `warnings` is
  // given). `names` holds the original string id of every node.
  static HeteroGraph build(int num_types, std::vector<std::string> names,
                           std::vector<int> types,
                           std::span<const std::pair<NodeId, NodeId>> edges,
                           std::vector<std::string>* warnings = nullptr);

  int num_types() const { return num_types_; }
  std::size_t node_count() const { return types_.size(); }
  std::size_t node_count(int type) const { return type_counts_.at(type); }
  int type_of(NodeId v) const { return types_[v]; }
  // Number of undirected edges.
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v, int type) const {
    const std::size_t slot = static_cast<std::size_t>(v) * num_types_ + type;
    return {neighbors_.data() + offsets_[slot],
            offsets_[slot + 1] - offsets_[slot]};
  }
  std::size_t degree(NodeId v) const {
    const std::size_t base = static_cast<std::size_t>(v) * num_types_;
    return offsets_[base + num_types_] - offsets_[base];
  }

  const std::string& name(NodeId v) const { return names_[v]; }
  std::optional<NodeId> find(std::string_view name) const;

  // Full scan of every structural invariant; throws on the first violation.
  void validate() const;

  bool operator==(const HeteroGraph& other) const {
    return num_types_ == other.num_types_ && names_ == other.names_ &&
           types_ == other.types_ && offsets_ == other.offsets_ &&
           neighbors_ == other.neighbors_;
  }

 private:
  int num_types_ = 1;
  std::vector<std::string> names_;
  std::vector<int> types_;
  std::vector<std::size_t> type_counts_;
  std::vector<std::size_t> offsets_{0};  // node_count * num_types + 1
  std::vector<NodeId> neighbors_;
  std::unordered_map<std::string, NodeId> index_;
};

// Reads "src<TAB>dst" rows ('#' comments and blank lines skipped) and an
// optional "node<TAB>type" file. Without a type file the graph has a single
// type and ids are numbered in order of first appearance; with one, ids
// follow the type file order and nodes listed there but absent from the edge
// list become isolated nodes. When `num_types` is positive, type ids must
// lie below it.
HeteroGraph load_graph(const std::filesystem::path& edge_file,
                       const std::optional<std::filesystem::path>& type_file,
                       std::vector<std::string>* warnings = nullptr,
                       int num_types = 0);

// Writes each undirected edge once plus a type file listing every node in id
// order; load_graph on the pair reproduces the graph exactly.
void save_graph(const HeteroGraph& graph,
                const std::filesystem::path& edge_file,
                const std::filesystem::path& type_file);

// One list per neighbor type, in ascending id order.
std::vector<std::span<const NodeId>> neighbors_by_type(
    const HeteroGraph& graph, NodeId v);

enum class LabelMode { multiclass, multilabel };

const char* to_string(LabelMode mode);
LabelMode parse_label_mode(std::string_view text);

struct LabelTable {
  LabelMode mode = LabelMode::multiclass;
  int num_classes = 0;
  // multiclass: class per node, -1 when unlabeled.
  std::vector<int> classes;
  // multilabel: indicator of length num_classes per node, empty when
  // unlabeled.
  std::vector<std::vector<std::uint8_t>> indicators;
  std::set<int> labeled_types;

  std::size_t node_count() const {
    return mode == LabelMode::multiclass ? classes.size() : indicators.size();
  }
  bool has_label(NodeId v) const {
    return mode == LabelMode::multiclass ? classes[v] >= 0
                                         : !indicators[v].empty();
  }
  // Ascending ids of all labeled nodes.
  std::vector<NodeId> labeled_nodes() const;
  // Label rendered the way label files spell it ("2" or "0,2"), "_" if none.
  std::string label_text(NodeId v) const;
};

// "node<TAB>label" rows (multiclass) or "node<TAB>l1,l2,..." (multilabel).
// The class count is one more than the largest index seen.
LabelTable load_labels(const std::filesystem::path& label_file,
                       const HeteroGraph& graph, LabelMode mode);

// Writes one "node<TAB>label[,label...]" row per labeled node.
void save_labels(const LabelTable& labels, const HeteroGraph& graph,
                 const std::filesystem::path& label_file);

struct DataSplit {
  std::vector<NodeId> labeled;  // ascending
  std::vector<NodeId> test;     // ascending
  std::uint64_t seed = 0;
  double labeled_fraction = 0.0;
};

// Uniform sample without replacement of round-half-up(fraction * n) labeled
// nodes; the remaining labeled nodes form the test set.
DataSplit make_split(const HeteroGraph& graph, const LabelTable& labels,
                     double labeled_fraction, std::uint64_t seed);

struct PlantedPartition {
  HeteroGraph graph;
  LabelTable labels;
};

// Homogeneous random graph with `num_communities` blocks of
// `community_size` nodes; pairs inside a block link with probability p_in,
// across blocks with p_out. Block index is the class label.
PlantedPartition planted_partition(int num_communities, int community_size,
                                   double p_in, double p_out,
                                   std::uint64_t seed);

}  // namespace pine

#endif  // PINE_GRAPH_HPP_
