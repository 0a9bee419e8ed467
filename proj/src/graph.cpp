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

#include "pine/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "pine/error.hpp"
#include "pine/rng.hpp"

namespace pine {
namespace {

struct Row {
  std::size_t line_no;
  std::string_view first;
  std::string_view second;
};

// Reads tab-separated two-field rows, skipping blanks and '#' comments.
template <typename Fn>
void for_each_row(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string_view view(line);
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == view.size() ||
        view.find('\t', tab + 1) != std::string_view::npos) {
      fail(ErrorCode::parse, path.string() + ":" + std::to_string(line_no) +
                                 ": malformed row, expected two tab-separated "
                                 "fields");
    }
    fn(Row{line_no, view.substr(0, tab), view.substr(tab + 1)});
  }
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

bool parse_int(std::string_view text, long long& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

HeteroGraph HeteroGraph::build(int num_types, std::vector<std::string> names,
                               std::vector<int> types,
                               std::span<const std::pair<NodeId, NodeId>> edges,
                               std::vector<std::string>* warnings) {
  require(num_types >= 1, "graph needs at least one node type");
  require(names.size() == types.size(), "names and types differ in length");
  const std::size_t n = types.size();

  HeteroGraph g;
  g.num_types_ = num_types;
  g.type_counts_.assign(num_types, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (types[v] < 0 || types[v] >= num_types) {
      fail(ErrorCode::invalid_argument,
           "node " + names[v] + " has type " + std::to_string(types[v]) +
               " outside [0," + std::to_string(num_types) + ")");
    }
    ++g.type_counts_[types[v]];
  }

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [a, b] : edges) {
    require(a < n && b < n, "edge endpoint out of range");
    if (a == b) {
      if (warnings) warnings->push_back("dropped self-loop on " + names[a]);
      continue;
    }
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  // Sort by (source, neighbor type, neighbor id) so each typed slot is a
  // contiguous ascending run.
  std::sort(arcs.begin(), arcs.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    if (types[x.second] != types[y.second])
      return types[x.second] < types[y.second];
    return x.second < y.second;
  });
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  g.offsets_.assign(n * num_types + 1, 0);
  for (auto [a, b] : arcs) ++g.offsets_[a * num_types + types[b] + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.reserve(arcs.size());
  for (auto [a, b] : arcs) g.neighbors_.push_back(b);

  g.index_.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!g.index_.emplace(names[v], static_cast<NodeId>(v)).second)
      fail(ErrorCode::invalid_argument, "duplicate node id " + names[v]);
  }
  g.names_ = std::move(names);
  g.types_ = std::move(types);
  return g;
}

std::optional<NodeId> HeteroGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void HeteroGraph::validate() const {
  const std::size_t n = node_count();
  auto bad = [](const std::string& what) { fail(ErrorCode::state, what); };
  if (offsets_.size() != n * num_types_ + 1) bad("offset table size mismatch");
  std::vector<std::size_t> counts(num_types_, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (types_[v] < 0 || types_[v] >= num_types_) bad("type out of range");
    ++counts[types_[v]];
  }
  if (counts != type_counts_) bad("type counts inconsistent");
  for (NodeId v = 0; v < n; ++v) {
    for (int k = 0; k < num_types_; ++k) {
      auto list = neighbors(v, k);
      for (std::size_t i = 0; i < list.size(); ++i) {
        const NodeId u = list[i];
        if (u >= n) bad("neighbor out of range");
        if (u == v) bad("self-loop on " + names_[v]);
        if (types_[u] != k) bad("neighbor in wrong type slot");
        if (i > 0 && list[i - 1] >= u) bad("neighbor list not strictly sorted");
        auto back = neighbors(u, types_[v]);
        if (!std::binary_search(back.begin(), back.end(), v))
          bad("asymmetric edge " + names_[v] + " -> " + names_[u]);
      }
    }
  }
}

HeteroGraph load_graph(const std::filesystem::path& edge_file,
                       const std::optional<std::filesystem::path>& type_file,
                       std::vector<std::string>* warnings, int num_types) {
  std::vector<std::string> names;
  std::vector<int> types;
  std::unordered_map<std::string, NodeId> ids;

  int k = 1;
  if (type_file) {
    int max_type = -1;
    for_each_row(*type_file, [&](const Row& row) {
      long long t = 0;
      if (!parse_int(row.second, t))
        fail(ErrorCode::parse, where(*type_file, row.line_no) +
                                   ": type id is not an integer");
      if (t < 0 || (num_types > 0 && t >= num_types) || t > 65535)
        fail(ErrorCode::parse, where(*type_file, row.line_no) + ": type id " +
                                   std::to_string(t) + " out of range");
      std::string name(row.first);
      if (!ids.emplace(name, static_cast<NodeId>(names.size())).second)
        fail(ErrorCode::parse,
             where(*type_file, row.line_no) + ": node " + name + " typed twice");
      names.push_back(std::move(name));
      types.push_back(static_cast<int>(t));
      max_type = std::max(max_type, static_cast<int>(t));
    });
    k = num_types > 0 ? num_types : std::max(1, max_type + 1);
  } else if (num_types > 1) {
    fail(ErrorCode::invalid_argument,
         "a type file is required for more than one node type");
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  auto resolve = [&](std::string_view name, std::size_t line_no) -> NodeId {
    std::string key(name);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (type_file)
      fail(ErrorCode::parse, where(edge_file, line_no) + ": node " + key +
                                 " missing from type file");
    const auto id = static_cast<NodeId>(names.size());
    ids.emplace(key, id);
    names.push_back(std::move(key));
    types.push_back(0);
    return id;
  };
  for_each_row(edge_file, [&](const Row& row) {
    const NodeId a = resolve(row.first, row.line_no);
    const NodeId b = resolve(row.second, row.line_no);
    edges.emplace_back(a, b);
  });
  return HeteroGraph::build(k, std::move(names), std::move(types), edges,
                            warnings);
}

void save_graph(const HeteroGraph& graph,
                const std::filesystem::path& edge_file,
                const std::filesystem::path& type_file) {
  std::ofstream types(type_file);
  std::ofstream edges(edge_file);
  if (!types || !edges)
    fail(ErrorCode::io, "cannot write " + edge_file.string() + " / " +
                            type_file.string());
  for (NodeId v = 0; v < graph.node_count(); ++v)
    types << graph.name(v) << '\t' << graph.type_of(v) << '\n';
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    for (int k = 0; k < graph.num_types(); ++k) {
      for (NodeId u : graph.neighbors(v, k)) {
        if (v < u) edges << graph.name(v) << '\t' << graph.name(u) << '\n';
      }
    }
  }
  if (!types || !edges) fail(ErrorCode::io, "write failed");
}

std::vector<std::span<const NodeId>> neighbors_by_type(
    const HeteroGraph& graph, NodeId v) {
  require(v < graph.node_count(), "invalid node id " + std::to_string(v));
  std::vector<std::span<const NodeId>> lists;
  lists.reserve(graph.num_types());
  for (int k = 0; k < graph.num_types(); ++k)
    lists.push_back(graph.neighbors(v, k));
  return lists;
}

const char* to_string(LabelMode mode) {
  return mode == LabelMode::multiclass ? "multiclass" : "multilabel";
}

LabelMode parse_label_mode(std::string_view text) {
  if (text == "multiclass") return LabelMode::multiclass;
  if (text == "multilabel") return LabelMode::multilabel;
  fail(ErrorCode::invalid_argument,
       "unknown label mode '" + std::string(text) + "'");
}

std::vector<NodeId> LabelTable::labeled_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < node_count(); ++v)
    if (has_label(v)) out.push_back(v);
  return out;
}

std::string LabelTable::label_text(NodeId v) const {
  if (!has_label(v)) return "_";
  if (mode == LabelMode::multiclass) return std::to_string(classes[v]);
  std::string out;
  for (int i = 0; i < num_classes; ++i) {
    if (!indicators[v][i]) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(i);
  }
  return out;
}

LabelTable load_labels(const std::filesystem::path& label_file,
                       const HeteroGraph& graph, LabelMode mode) {
  const std::size_t n = graph.node_count();
  std::vector<std::vector<int>> raw(n);
  std::vector<bool> seen(n, false);
  int max_label = -1;

  for_each_row(label_file, [&](const Row& row) {
    const auto node = graph.find(row.first);
    if (!node)
      fail(ErrorCode::parse, where(label_file, row.line_no) + ": node " +
                                 std::string(row.first) + " not in graph");
    if (seen[*node])
      fail(ErrorCode::parse, where(label_file, row.line_no) + ": node " +
                                 std::string(row.first) + " labeled twice");
    seen[*node] = true;
    std::string_view rest = row.second;
    if (mode == LabelMode::multiclass &&
        rest.find(',') != std::string_view::npos)
      fail(ErrorCode::parse, where(label_file, row.line_no) +
                                 ": multiclass row lists several labels");
    while (true) {
      const auto comma = rest.find(',');
      const auto token = rest.substr(0, comma);
      long long label = 0;
      if (token.empty())
        fail(ErrorCode::parse,
             where(label_file, row.line_no) + ": empty label list entry");
      if (!parse_int(token, label))
        fail(ErrorCode::parse, where(label_file, row.line_no) +
                                   ": label is not an integer");
      if (label < 0)
        fail(ErrorCode::parse, where(label_file, row.line_no) +
                                   ": negative label " + std::to_string(label));
      if (label > 1'000'000)
        fail(ErrorCode::parse,
             where(label_file, row.line_no) + ": label index too large");
      raw[*node].push_back(static_cast<int>(label));
      max_label = std::max(max_label, static_cast<int>(label));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  });

  LabelTable table;
  table.mode = mode;
  table.num_classes = max_label + 1;
  if (mode == LabelMode::multiclass) {
    table.classes.assign(n, -1);
  } else {
    table.indicators.assign(n, {});
  }
  for (NodeId v = 0; v < n; ++v) {
    if (raw[v].empty()) continue;
    table.labeled_types.insert(graph.type_of(v));
    if (mode == LabelMode::multiclass) {
      table.classes[v] = raw[v][0];
    } else {
      table.indicators[v].assign(table.num_classes, 0);
      for (int label : raw[v]) table.indicators[v][label] = 1;
    }
  }
  return table;
}

void save_labels(const LabelTable& labels, const HeteroGraph& graph,
                 const std::filesystem::path& label_file) {
  require(labels.node_count() == graph.node_count(),
          "label table does not match graph");
  std::ofstream out(label_file);
  if (!out) fail(ErrorCode::io, "cannot write " + label_file.string());
  for (NodeId v = 0; v < graph.node_count(); ++v)
    if (labels.has_label(v))
      out << graph.name(v) << '\t' << labels.label_text(v) << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + label_file.string());
}

DataSplit make_split(const HeteroGraph& graph, const LabelTable& labels,
                     double labeled_fraction, std::uint64_t seed) {
  if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0))
    fail(ErrorCode::invalid_argument, "labeled fraction must lie in (0,1)");
  require(labels.node_count() == graph.node_count(),
          "label table does not match graph");
  std::vector<NodeId> eligible;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (labels.has_label(v) && labels.labeled_types.count(graph.type_of(v)))
      eligible.push_back(v);
  }
  if (eligible.empty())
    fail(ErrorCode::invalid_argument, "no labeled nodes to split");

  Rng rng(derive_seed(seed, "split"));
  for (std::size_t i = eligible.size(); i > 1; --i)
    std::swap(eligible[i - 1], eligible[rng.below(i)]);

  const auto take = static_cast<std::size_t>(
      std::floor(labeled_fraction * static_cast<double>(eligible.size()) + 0.5));
  DataSplit split;
  split.seed = seed;
  split.labeled_fraction = labeled_fraction;
  split.labeled.assign(eligible.begin(), eligible.begin() + take);
  split.test.assign(eligible.begin() + take, eligible.end());
  std::sort(split.labeled.begin(), split.labeled.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

PlantedPartition planted_partition(int num_communities, int community_size,
                                   double p_in, double p_out,
                                   std::uint64_t seed) {
  require(num_communities > 0 && community_size > 0,
          "planted partition needs at least one community of one node");
  require(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0,
          "edge probabilities must lie in [0,1]");
  const std::size_t n =
      static_cast<std::size_t>(num_communities) * community_size;
  std::vector<std::string> names(n);
  std::vector<int> types(n, 0);
  for (std::size_t v = 0; v < n; ++v) names[v] = std::to_string(v);

  Rng rng(derive_seed(seed, "planted"));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const bool same = a / community_size == b / community_size;
      if (rng.bernoulli(same ? p_in : p_out))
        edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
  }

  PlantedPartition out;
  out.graph = HeteroGraph::build(1, std::move(names), std::move(types), edges);
  out.labels.mode = LabelMode::multiclass;
  out.labels.num_classes = num_communities;
  out.labels.classes.resize(n);
  for (std::size_t v = 0; v < n; ++v)
    out.labels.classes[v] = static_cast<int>(v / community_size);
  out.labels.labeled_types = {0};
  return out;
}

}  // namespace pine
