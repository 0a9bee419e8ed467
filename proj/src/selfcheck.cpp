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

#include "pine/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "pine/rng.hpp"

namespace pine {
namespace {

// Relative deviation with a magnitude floor so that outputs that happen to
// sit near zero are compared on the scale of ordinary rounding error.
double rel_dev(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

std::vector<double> evaluate(const PineParams& params, NeighborBundle bundle,
                             bool corrupt) {
  if (corrupt) {
    for (auto& group : bundle.groups)
      for (std::size_t n = 0; n < group.count; ++n)
        for (double& x : group.col(n)) x *= 1.0 + 0.01 * static_cast<double>(n);
  }
  return pine_forward(params, bundle);
}

NeighborBundle permute(const NeighborBundle& bundle, Rng& rng) {
  NeighborBundle out = bundle;
  for (std::size_t k = 0; k < bundle.groups.size(); ++k) {
    const auto& src = bundle.groups[k];
    std::vector<std::size_t> order(src.count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t n = 0; n < src.count; ++n) {
      auto from = src.col(order[n]);
      std::copy(from.begin(), from.end(), out.groups[k].col(n).begin());
    }
  }
  return out;
}

CheckLine check_invariance(const CheckOptions& opt) {
  CheckLine line{"partial permutation invariance", true, "", ""};
  char buf[256];
  double worst = 0.0;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const std::uint64_t seed = derive_seed(opt.seed, "invariance", trial);
    RandomInstance inst = random_instance(seed, {});
    Rng rng(derive_seed(seed, "permutation"));
    const auto base = evaluate(inst.params, inst.bundle, opt.corrupt_symmetry);
    const auto moved = evaluate(inst.params, permute(inst.bundle, rng),
                                opt.corrupt_symmetry);
    for (std::size_t m = 0; m < base.size(); ++m) {
      const double dev = rel_dev(moved[m], base[m], 1e-4);
      worst = std::max(worst, dev);
      if (dev > 1e-10 && line.passed) {
        line.passed = false;
        line.replay = instance_json(inst);
      }
    }
  }
  std::snprintf(buf, sizeof buf, "%d trials, max relative deviation %.3g (tol 1e-10)",
                opt.trials, worst);
  line.detail = buf;
  return line;
}

CheckLine check_gradients(const CheckOptions& opt) {
  CheckLine line{"analytic vs finite-difference gradients", true, "", ""};
  char buf[256];
  const int trials = std::max(1, opt.trials / 5);
  const double h = 1e-5;
  double worst = 0.0;
  InstanceLimits limits;
  limits.max_types = 2;
  limits.max_dim = 3;
  limits.max_width = 2;
  limits.max_neighbors = 3;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed = derive_seed(opt.seed, "gradient", trial);
    RandomInstance inst = random_instance(seed, limits);
    Rng rng(derive_seed(seed, "upstream"));
    std::vector<double> upstream(inst.params.shape.dim);
    for (double& u : upstream) u = rng.uniform(-1.0, 1.0);
    auto objective = [&](const PineParams& p, const NeighborBundle& b) {
      return dot(upstream, evaluate(p, b, opt.corrupt_symmetry));
    };
    const PineGradients grads =
        pine_backward(inst.params, inst.bundle, upstream);
    bool failed = false;
    auto compare = [&](double analytic, double numeric) {
      const double dev = rel_dev(analytic, numeric, 1e-4);
      worst = std::max(worst, dev);
      if (dev > 1e-5) failed = true;
    };
    PineParams probe = inst.params;
    auto probe_tensors = probe.tensors();
    auto grad_tensors = grads.params.tensors();
    for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
      for (std::size_t i = 0; i < probe_tensors[t]->size(); ++i) {
        double& slot = (*probe_tensors[t])[i];
        const double saved = slot;
        slot = saved + h;
        const double up = objective(probe, inst.bundle);
        slot = saved - h;
        const double down = objective(probe, inst.bundle);
        slot = saved;
        compare((*grad_tensors[t])[i], (up - down) / (2 * h));
      }
    }
    NeighborBundle moved = inst.bundle;
    for (std::size_t k = 0; k < moved.groups.size(); ++k) {
      for (std::size_t i = 0; i < moved.groups[k].data.size(); ++i) {
        double& slot = moved.groups[k].data[i];
        const double saved = slot;
        slot = saved + h;
        const double up = objective(inst.params, moved);
        slot = saved - h;
        const double down = objective(inst.params, moved);
        slot = saved;
        compare(grads.neighbors[k].data[i], (up - down) / (2 * h));
      }
    }
    if (failed && line.passed) {
      line.passed = false;
      line.replay = instance_json(inst);
    }
  }
  std::snprintf(buf, sizeof buf, "%d instances, max relative error %.3g (tol 1e-5)",
                trials, worst);
  line.detail = buf;
  return line;
}

CheckLine check_oracle(const CheckOptions& opt) {
  CheckLine line{"symmetrization oracle fixed point", true, "", ""};
  char buf[256];
  const int trials = std::max(1, opt.trials / 10);
  double worst = 0.0;
  int done = 0;
  for (std::uint64_t attempt = 0; done < trials; ++attempt) {
    const std::uint64_t seed = derive_seed(opt.seed, "oracle", attempt);
    RandomInstance inst = random_instance(seed, {});
    std::uint64_t perms = 1;
    for (const auto& g : inst.bundle.groups)
      for (std::uint64_t i = 2; i <= g.count; ++i) perms *= i;
    if (perms > 720) continue;
    ++done;
    const auto direct = evaluate(inst.params, inst.bundle, opt.corrupt_symmetry);
    for (std::size_t m = 0; m < direct.size(); ++m) {
      const double sym = symmetrized_oracle(
          [&](const NeighborBundle& b) {
            return evaluate(inst.params, b, opt.corrupt_symmetry)[m];
          },
          inst.bundle);
      const double dev = rel_dev(sym, direct[m], 1e-4);
      worst = std::max(worst, dev);
      if (dev > 1e-10 && line.passed) {
        line.passed = false;
        line.replay = instance_json(inst);
      }
    }
  }
  std::snprintf(buf, sizeof buf, "%d bundles, max relative deviation %.3g (tol 1e-10)",
                trials, worst);
  line.detail = buf;
  return line;
}

CheckLine check_smooth_max(const CheckOptions& opt) {
  CheckLine line{"smooth max", true, "", ""};
  char buf[256];
  const double ks[] = {1, 2, 5, 10, 20};
  const double reference[] = {1.0, 2.0, 3.0};
  std::string table = "k:err for {1,2,3} =";
  for (double k : ks) {
    std::snprintf(buf, sizeof buf, " %g:%.3g", k, 3.0 - smooth_max(reference, k));
    table += buf;
  }
  const double at10 = smooth_max(reference, 10.0);
  if (std::abs(at10 - 2.9999546) > 1e-6) line.passed = false;
  Rng rng(derive_seed(opt.seed, "smooth_max"));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(2 + rng.below(7));
    for (double& x : values) x = rng.uniform();
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const double top = values.back();
    double prev = INFINITY;
    for (double k : ks) {
      const double err = top - smooth_max(values, k);
      if (!(err < prev)) {
        line.passed = false;
        nlohmann::json j;
        j["values"] = values;
        line.replay = j.dump();
      }
      prev = err;
    }
  }
  std::snprintf(buf, sizeof buf, "; k=10 -> %.8f; 50 random lists", at10);
  line.detail = table + buf;
  return line;
}

}  // namespace

RandomInstance random_instance(std::uint64_t seed, const InstanceLimits& limits) {
  Rng rng(seed);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  };
  PineShape shape;
  shape.num_types = pick(1, limits.max_types);
  shape.dim = pick(1, limits.max_dim);
  shape.num_hidden = pick(1, limits.max_width);
  for (int k = 0; k < shape.num_types; ++k) {
    shape.num_directions.push_back(pick(1, limits.max_width));
    shape.num_scales.push_back(pick(1, limits.max_width));
  }
  shape.activation = rng.bernoulli(0.5) ? Activation::logistic : Activation::tanh;
  shape.sharing = rng.bernoulli(0.75) ? Sharing::shared : Sharing::independent;

  RandomInstance inst;
  inst.params = PineParams::zeros(shape);
  for (Tensor* t : inst.params.tensors())
    for (double& x : t->data) x = rng.uniform(-1.0, 1.0);
  for (int k = 0; k < shape.num_types; ++k) {
    Columns cols(shape.dim, pick(0, limits.max_neighbors));
    for (double& x : cols.data) x = rng.uniform(-1.0, 1.0);
    inst.bundle.groups.push_back(std::move(cols));
  }
  return inst;
}

std::string instance_json(const RandomInstance& inst) {
  nlohmann::json j;
  const PineShape& s = inst.params.shape;
  j["shape"] = {{"num_types", s.num_types},
                {"dim", s.dim},
                {"hidden", s.num_hidden},
                {"directions", s.num_directions},
                {"scales", s.num_scales},
                {"activation", to_string(s.activation)},
                {"sharing", to_string(s.sharing)}};
  for (const Tensor* t : inst.params.tensors()) j["params"][t->name] = t->data;
  for (const auto& g : inst.bundle.groups)
    j["bundle"].push_back({{"count", g.count}, {"columns", g.data}});
  return j.dump();
}

std::vector<CheckLine> run_self_checks(const CheckOptions& options) {
  return {check_invariance(options), check_gradients(options),
          check_oracle(options), check_smooth_max(options)};
}

}  // namespace pine
