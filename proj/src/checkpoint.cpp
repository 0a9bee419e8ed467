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

#include "pine/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pine/config.hpp"
#include "pine/error.hpp"

namespace pine {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'I', 'N', 'E', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void pod(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof value);
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void tensor(const Tensor& t) {
    str(t.name);
    pod(static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t dim : t.shape) pod(static_cast<std::uint64_t>(dim));
    out_.write(reinterpret_cast<const char*>(t.data.data()),
               static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <typename T>
  T pod() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in_) corrupt("truncated");
    return value;
  }
  std::string str() {
    const auto len = pod<std::uint32_t>();
    if (len > (1u << 20)) corrupt("string too long");
    std::string s(len, '\0');
    in_.read(s.data(), len);
    if (!in_) corrupt("truncated");
    return s;
  }
  Tensor tensor() {
    Tensor t;
    t.name = str();
    const auto rank = pod<std::uint32_t>();
    if (rank > 8) corrupt("bad tensor rank");
    for (std::uint32_t i = 0; i < rank; ++i)
      t.shape.push_back(static_cast<std::size_t>(pod<std::uint64_t>()));
    const std::size_t count = Tensor::element_count(t.shape);
    if (count > (std::size_t{1} << 34)) corrupt("tensor too large");
    t.data.resize(count);
    in_.read(reinterpret_cast<char*>(t.data.data()),
             static_cast<std::streamsize>(count * sizeof(double)));
    if (!in_) corrupt("truncated tensor " + t.name);
    return t;
  }
  [[noreturn]] void corrupt(const std::string& why) {
    fail(ErrorCode::parse, "corrupt checkpoint " + source_ + ": " + why);
  }

 private:
  std::istream& in_;
  std::string source_;
};

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> split_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

const std::string& need(const std::map<std::string, std::string>& meta,
                        const std::string& key, Reader& reader) {
  auto it = meta.find(key);
  if (it == meta.end()) reader.corrupt("missing metadata '" + key + "'");
  return it->second;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const AdamState* adam,
                     const std::map<std::string, std::string>& extra_meta) {
  state.validate();
  const PineShape& shape = state.pine.shape;
  std::map<std::string, std::string> meta = extra_meta;
  meta["shape.num_types"] = std::to_string(shape.num_types);
  meta["shape.dim"] = std::to_string(shape.dim);
  meta["shape.hidden"] = std::to_string(shape.num_hidden);
  meta["shape.directions"] = join_ints(shape.num_directions);
  meta["shape.scales"] = join_ints(shape.num_scales);
  meta["shape.activation"] = to_string(shape.activation);
  meta["shape.sharing"] = to_string(shape.sharing);
  meta["nodes"] = std::to_string(state.node_count());
  meta["classes"] = std::to_string(state.head.num_classes());
  if (adam) {
    meta["adam.step"] = std::to_string(adam->step);
    meta["adam.lr"] = format_double(adam->hyper.learning_rate);
    meta["adam.beta1"] = format_double(adam->hyper.beta1);
    meta["adam.beta2"] = format_double(adam->hyper.beta2);
    meta["adam.epsilon"] = format_double(adam->hyper.epsilon);
    meta["adam.decay"] = format_double(adam->hyper.decay);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write checkpoint " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.pod(kCheckpointVersion);
  w.pod(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    w.str(k);
    w.str(v);
  }
  auto tensors = state.tensors();
  std::uint32_t count = static_cast<std::uint32_t>(tensors.size());
  if (adam) count += static_cast<std::uint32_t>(adam->first.size() * 2);
  w.pod(count);
  for (const Tensor* t : tensors) w.tensor(*t);
  if (adam) {
    for (const Tensor& t : adam->first) w.tensor(t);
    for (const Tensor& t : adam->second) w.tensor(t);
  }
  out.flush();
  if (!out) fail(ErrorCode::io, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open checkpoint " + path.string());
  Reader r(in, path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    r.corrupt("bad magic");
  if (r.pod<std::uint32_t>() != kCheckpointVersion)
    r.corrupt("unsupported version");

  Checkpoint ck;
  const auto n_meta = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string key = r.str();
    ck.meta[key] = r.str();
  }
  std::map<std::string, Tensor> found;
  const auto n_tensor = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_tensor; ++i) {
    Tensor t = r.tensor();
    std::string name = t.name;
    found[name] = std::move(t);
  }
  if (in.peek() != std::char_traits<char>::eof()) r.corrupt("trailing bytes");

  PineShape shape;
  try {
    shape.num_types = std::stoi(need(ck.meta, "shape.num_types", r));
    shape.dim = std::stoi(need(ck.meta, "shape.dim", r));
    shape.num_hidden = std::stoi(need(ck.meta, "shape.hidden", r));
    shape.num_directions = split_ints(need(ck.meta, "shape.directions", r));
    shape.num_scales = split_ints(need(ck.meta, "shape.scales", r));
    shape.activation = parse_activation(need(ck.meta, "shape.activation", r));
    shape.sharing = parse_sharing(need(ck.meta, "shape.sharing", r));
    shape.validate();
  } catch (const std::logic_error&) {
    r.corrupt("bad shape metadata");
  } catch (const Error&) {
    r.corrupt("bad shape metadata");
  }
  const std::size_t nodes = std::stoull(need(ck.meta, "nodes", r));
  const int classes = std::stoi(need(ck.meta, "classes", r));

  ModelState& s = ck.state;
  s.pine = PineParams::zeros(shape);
  s.embeddings = Tensor("embeddings", {nodes, static_cast<std::size_t>(shape.dim)});
  s.head.weights = Tensor("head.weights", {static_cast<std::size_t>(classes),
                                           static_cast<std::size_t>(shape.dim)});
  s.head.bias = Tensor("head.bias", {static_cast<std::size_t>(classes)});
  auto take = [&](Tensor& slot) {
    auto it = found.find(slot.name);
    if (it == found.end()) r.corrupt("missing tensor " + slot.name);
    if (!it->second.same_shape(slot))
      r.corrupt("tensor " + slot.name + " has unexpected shape");
    slot.data = std::move(it->second.data);
    found.erase(it);
  };
  for (Tensor* t : s.tensors()) take(*t);

  if (ck.meta.count("adam.step")) {
    AdamState adam;
    adam.reset(s.tensors());
    adam.step = std::stoull(ck.meta.at("adam.step"));
    adam.hyper.learning_rate = std::stod(need(ck.meta, "adam.lr", r));
    adam.hyper.beta1 = std::stod(need(ck.meta, "adam.beta1", r));
    adam.hyper.beta2 = std::stod(need(ck.meta, "adam.beta2", r));
    adam.hyper.epsilon = std::stod(need(ck.meta, "adam.epsilon", r));
    adam.hyper.decay = std::stod(need(ck.meta, "adam.decay", r));
    for (Tensor& t : adam.first) take(t);
    for (Tensor& t : adam.second) take(t);
    ck.adam = std::move(adam);
  }
  if (!found.empty()) r.corrupt("unexpected tensor " + found.begin()->first);
  s.validate();
  return ck;
}

}  // namespace pine
