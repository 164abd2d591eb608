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
#include <vector>

#include "nolgat/graph.hpp"
#include "nolgat/metrics.hpp"
#include "nolgat/model.hpp"
#include "nolgat/optim.hpp"

namespace nolgat {

/// Semi-supervised split: which nodes expose their labels during training.
/// Stratified so per-class labeled counts stay proportional to class
/// frequencies within one item.
struct SplitSpec {
  std::uint64_t seed = 0;
  double fraction = 0.0;
  std::vector<char> labeled_mask;
};

/// Stratified uniform sample without replacement, deterministic per seed.
/// Rejects fractions that would leave a class with zero labeled items.
SplitSpec make_split(std::span<const std::int8_t> labels, double fraction,
                     std::uint64_t seed);

/// Mean binary cross entropy over the labeled nodes only:
///   -(1/|D_L|) sum [ y log p + (1-y) log(1-p) ]
/// Probabilities are clamped to [1e-12, 1-1e-12] before the logs. The labeled
/// set must be nonempty; unlabeled probabilities do not affect value or
/// gradients.
Value masked_bce_loss(const Value& probabilities,
                      std::span<const std::int8_t> labels,
                      std::span<const char> labeled_mask);

struct ChosenOrderRow {
  std::uint64_t epoch;
  int layer;
  std::int32_t node;
  std::int32_t order;
};

struct TrainSettings {
  std::uint64_t epochs = 200;
  AdamConfig adam;
  bool eval_argmax = false;
  // When set, every epoch's chosen orders are appended here (diagnostics).
  std::vector<ChosenOrderRow>* order_log = nullptr;
};

struct TrainResult {
  ParamStore params;                 // trained model state
  RunMetrics metrics;                // on the unlabeled evaluation set
  std::vector<double> loss_curve;    // one entry per epoch
  std::vector<std::int8_t> predictions;              // per node
  std::vector<std::vector<std::int32_t>> eval_chosen;  // layers x n at eval
};

/// Full training run: epochs of {forward, masked loss, backward, adam step},
/// then evaluation on the unlabeled nodes. Deterministic per seed: the seed
/// fixes initialization, sampling noise, and therefore every update.
/// A non-finite loss aborts with the epoch number (NumericError).
TrainResult train(const NolGatConfig& model_config, const TrainSettings& st,
                  const Dataset& dataset, const SplitSpec& split,
                  const HopIndex& hops, std::uint64_t seed);

}  // namespace nolgat
