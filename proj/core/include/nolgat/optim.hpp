// Copyright 2026 the nolgat authors
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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "nolgat/autodiff.hpp"

namespace nolgat {

enum class Init { kGlorotUniform, kZeros };

/// Named map of trainable leaves. Iteration is sorted by identifier and each
/// parameter's initialization is keyed by (seed, name), so stores built in any
/// order are bitwise identical for the same seed.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed) : seed_(seed) {}

  /// Creates (and returns) a parameter. Names must be unique.
  /// Glorot-uniform draws from U(-a, a) with a = sqrt(6 / (fan_in + fan_out));
  /// for rank-2 shapes fan_in/fan_out are the two dims, for rank-1 the size
  /// and 1.
  Value create(const std::string& name, Shape shape, Init init);

  const Value& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name); }
  void zero_grads();
  std::size_t size() const { return params_.size(); }
  std::uint64_t seed() const { return seed_; }

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Value> params_;
  std::uint64_t seed_;
};

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 5e-4;
};

/// Adam with decoupled weight decay: p <- p - lr*wd*p is applied before the
/// bias-corrected Adam delta, so the decay never enters the moment estimates.
class AdamState {
 public:
  explicit AdamState(AdamConfig config) : config_(config) {}

  /// One update over every parameter in the store. Requires populated grads;
  /// throws NumericError naming the parameter if any gradient entry is not
  /// finite. Grads are zeroed afterwards.
  void step(ParamStore& params);

  std::int64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }

 private:
  struct Moments {
    std::vector<double> m1;
    std::vector<double> m2;
  };
  AdamConfig config_;
  std::map<std::string, Moments> moments_;
  std::int64_t step_count_ = 0;
};

/// Central-difference gradient check. Runs loss_fn once for the analytic
/// gradients, then perturbs every parameter entry by +/-eps and compares.
/// Returns max over entries of |analytic - fd| / max(1e-8, |analytic| + |fd|).
/// loss_fn must be deterministic (any sampler noise frozen across calls);
/// a non-finite loss raises NumericError identifying the perturbation.
double grad_check(const std::function<Value(ParamStore&)>& loss_fn,
                  ParamStore& params, double eps);

}  // namespace nolgat
