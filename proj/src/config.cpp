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

#include "pine/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pine/error.hpp"
#include "pine/rng.hpp"

namespace pine {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  fail(ErrorCode::invalid_argument, "invalid value '" + std::string(value) +
                                        "' for config key '" +
                                        std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T out{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) bad_value(key, text);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) bad_value(key, text);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<T>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

template <typename T>
void broadcast(std::vector<T>& values, int num_types, const char* key) {
  if (values.size() == 1 && num_types > 1) values.assign(num_types, values[0]);
  if (values.size() != static_cast<std::size_t>(num_types))
    fail(ErrorCode::invalid_argument,
         std::string("config key '") + key + "' needs " +
             std::to_string(num_types) + " entries");
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  // Prefer the shortest representation that round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", precision, value);
    if (std::strtod(shorter, nullptr) == value) return shorter;
  }
  return buf;
}

TrainConfig TrainConfig::defaults(int num_types, LabelMode mode) {
  TrainConfig c;
  if (num_types > 1) {
    c.num_hidden = 8;
    c.num_directions.assign(num_types, 16);
    c.num_scales.assign(num_types, 8);
    c.lambdas.assign(num_types, 200.0);
    c.lambdas[0] = 0.2;
  } else {
    c.num_hidden = 16;
    c.num_directions = {32};
    c.num_scales = {16};
    c.lambdas = {0.005};
  }
  c.lambda_w = mode == LabelMode::multiclass ? 1e-3 : 1e-4;
  return c;
}

void TrainConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "dim") {
    dim = parse_number<int>(key, value);
  } else if (key == "hidden") {
    num_hidden = parse_number<int>(key, value);
  } else if (key == "directions") {
    num_directions = parse_list<int>(key, value);
  } else if (key == "scales") {
    num_scales = parse_list<int>(key, value);
  } else if (key == "lambda") {
    lambdas = parse_list<double>(key, value);
  } else if (key == "lambda_w") {
    lambda_w = parse_number<double>(key, value);
  } else if (key == "epochs") {
    epochs = parse_number<int>(key, value);
  } else if (key == "batch") {
    if (value == "auto") {
      batch = BatchMode::automatic;
    } else if (value == "full") {
      batch = BatchMode::full;
    } else {
      batch = BatchMode::minibatch;
      batch_size = parse_number<std::size_t>(key, value);
      if (batch_size == 0) bad_value(key, value);
    }
  } else if (key == "full_batch_limit") {
    full_batch_limit = parse_number<std::size_t>(key, value);
  } else if (key == "neighbor_cap") {
    neighbor_cap = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "lr") {
    adam.learning_rate = parse_number<double>(key, value);
  } else if (key == "beta1") {
    adam.beta1 = parse_number<double>(key, value);
  } else if (key == "beta2") {
    adam.beta2 = parse_number<double>(key, value);
  } else if (key == "epsilon") {
    adam.epsilon = parse_number<double>(key, value);
  } else if (key == "lr_decay") {
    adam.decay = parse_number<double>(key, value);
  } else if (key == "activation") {
    activation = parse_activation(value);
  } else if (key == "sharing") {
    sharing = parse_sharing(value);
  } else if (key == "workers") {
    workers = parse_number<int>(key, value);
  } else if (key == "validation_fraction") {
    validation_fraction = parse_number<double>(key, value);
  } else if (key == "eval_every") {
    eval_every = parse_number<int>(key, value);
  } else if (key == "threshold") {
    threshold = parse_number<double>(key, value);
  } else if (key == "init_scale") {
    init_scale = parse_number<double>(key, value);
  } else {
    fail(ErrorCode::invalid_argument,
         "unknown config key '" + std::string(key) + "'");
  }
}

void TrainConfig::resolve(int num_types) {
  broadcast(num_directions, num_types, "directions");
  broadcast(num_scales, num_types, "scales");
  broadcast(lambdas, num_types, "lambda");
  validate(num_types);
}

void TrainConfig::validate(int num_types) const {
  auto check = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::invalid_argument, what);
  };
  check(num_types >= 1, "graph has no node types");
  check(dim >= 1, "dim must be positive");
  check(num_hidden >= 1, "hidden must be positive");
  check(num_directions.size() == static_cast<std::size_t>(num_types) &&
            num_scales.size() == static_cast<std::size_t>(num_types) &&
            lambdas.size() == static_cast<std::size_t>(num_types),
        "per-type settings need one entry per node type");
  for (int k = 0; k < num_types; ++k) {
    check(num_directions[k] >= 1 && num_scales[k] >= 1,
          "directions and scales must be positive");
    check(lambdas[k] > 0.0, "lambda entries must be positive");
  }
  check(lambda_w >= 0.0, "lambda_w must be non-negative");
  check(epochs >= 0, "epochs must be non-negative");
  check(adam.learning_rate > 0.0, "lr must be positive");
  check(adam.beta1 >= 0.0 && adam.beta1 < 1.0, "beta1 must lie in [0,1)");
  check(adam.beta2 >= 0.0 && adam.beta2 < 1.0, "beta2 must lie in [0,1)");
  check(adam.epsilon > 0.0, "epsilon must be positive");
  check(adam.decay >= 0.0, "lr_decay must be non-negative");
  check(workers >= 1, "workers must be positive");
  check(validation_fraction >= 0.0 && validation_fraction < 1.0,
        "validation_fraction must lie in [0,1)");
  check(eval_every >= 1, "eval_every must be positive");
  check(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0,1)");
}

PineShape TrainConfig::pine_shape(int num_types) const {
  PineShape s;
  s.num_types = num_types;
  s.dim = dim;
  s.num_hidden = num_hidden;
  s.num_directions = num_directions;
  s.num_scales = num_scales;
  s.activation = activation;
  s.sharing = sharing;
  s.validate();
  return s;
}

std::vector<std::pair<std::string, std::string>> TrainConfig::items() const {
  std::string batch_text = batch == BatchMode::automatic ? "auto"
                           : batch == BatchMode::full
                               ? "full"
                               : std::to_string(batch_size);
  return {
      {"dim", std::to_string(dim)},
      {"hidden", std::to_string(num_hidden)},
      {"directions", join(num_directions)},
      {"scales", join(num_scales)},
      {"lambda", join(lambdas)},
      {"lambda_w", format_double(lambda_w)},
      {"epochs", std::to_string(epochs)},
      {"batch", batch_text},
      {"full_batch_limit", std::to_string(full_batch_limit)},
      {"neighbor_cap", std::to_string(neighbor_cap)},
      {"seed", std::to_string(seed)},
      {"lr", format_double(adam.learning_rate)},
      {"beta1", format_double(adam.beta1)},
      {"beta2", format_double(adam.beta2)},
      {"epsilon", format_double(adam.epsilon)},
      {"lr_decay", format_double(adam.decay)},
      {"activation", to_string(activation)},
      {"sharing", to_string(sharing)},
      {"workers", std::to_string(workers)},
      {"validation_fraction", format_double(validation_fraction)},
      {"eval_every", std::to_string(eval_every)},
      {"threshold", format_double(threshold)},
      {"init_scale", format_double(init_scale)},
  };
}

std::string TrainConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : items()) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t TrainConfig::hash() const { return fnv1a(to_text()); }

void ConfigOverrides::set(std::string_view key, std::string_view value) {
  TrainConfig probe;
  probe.set(key, value);
  // Range checks too; per-type lists broadcast to the longest one given.
  const std::size_t types = std::max({probe.num_directions.size(),
                                      probe.num_scales.size(),
                                      probe.lambdas.size()});
  probe.resolve(static_cast<int>(types));
  items_.emplace_back(std::string(key), std::string(trim(value)));
}

bool ConfigOverrides::has(std::string_view key) const {
  for (const auto& item : items_)
    if (item.first == key) return true;
  return false;
}

void ConfigOverrides::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view[0] == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::parse, path.string() + ":" + std::to_string(line_no) +
                                 ": expected 'key = value'");
    try {
      set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const Error& e) {
      fail(ErrorCode::parse,
           path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

TrainConfig ConfigOverrides::resolve(int num_types, LabelMode mode) const {
  TrainConfig c = TrainConfig::defaults(num_types, mode);
  for (const auto& [k, v] : items_) c.set(k, v);
  c.resolve(num_types);
  return c;
}

}  // namespace pine
