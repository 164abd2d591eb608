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
#include <optional>
#include <vector>

#include "nolgat/graph.hpp"
#include "nolgat/layers.hpp"
#include "nolgat/sampler.hpp"

namespace nolgat {

// The model stacks L layers, each pairing a hop network (phi) that scores the
// available neighborhood orders with an embedding network (psi) that
// aggregates over the order each node drew. The draw is a straight-through
// Gumbel-Softmax sample: forward consumers see the hard choice while
// gradients reach phi through the relaxed scores.

enum class RelaxationMode {
  kStraightThrough,  // one aggregation per node over its chosen order
  kDenseRelaxed,     // aggregate every order, weighted by the ST scores
};

struct NolGatConfig {
  int layers = 2;
  int phi_hop = 1;  // the fixed exact-hop order phi itself aggregates over
  std::vector<int> hidden = {128, 64};  // psi output widths, one per layer
  std::vector<int> heads = {4, 4};      // attention heads, one per layer
  std::vector<int> mlp_hidden = {32};
  double temperature = 1.0;
  RelaxationMode relaxation = RelaxationMode::kStraightThrough;
  bool baseline_mode = false;  // order 1 everywhere, phi bypassed entirely
  bool anneal_temperature = false;  // linear ramp to 0.1 across epochs
  double dropout = 0.0;             // hook; off by default
};

struct ForwardOptions {
  std::uint64_t epoch = 0;
  double temperature = 0.0;  // <= 0 means "use the config temperature"
  // Dense-relaxed only: when false, the forward pass uses the smooth relaxed
  // weights instead of correcting them to the hard one-hot. This makes the
  // whole loss differentiable, which is what the gradient suite checks.
  bool hard_forward = true;
  bool argmax_selection = false;  // zero sampler noise (deterministic eval)
  std::optional<int> forced_order;  // test hook: pin every node's selection
  bool training = false;            // enables the dropout hook if configured
};

struct LayerForward {
  Value h;
  std::vector<std::int32_t> chosen;  // per node; the order psi aggregated over
};

struct ModelForward {
  Value probabilities;  // [n, 1]
  std::vector<std::vector<std::int32_t>> chosen_orders;  // layers x n
};

class NolGatModel {
 public:
  /// Registers all phi/psi/MLP parameters in `params`. gamma_size must equal
  /// hop_index.max_order + 1 of the index used at forward time.
  NolGatModel(ParamStore& params, NolGatConfig config, int in_dim,
              int gamma_size);

  /// Hop-network logits over the orders for one layer: a single GATv2 pass of
  /// phi over the fixed phi_hop neighborhoods. Skipped in baseline mode.
  Value hop_logits(int layer, const Value& h_prev, const HopIndex& hops) const;

  LayerForward layer_forward(int layer, const Value& h_prev,
                             const HopIndex& hops, std::uint64_t sample_seed,
                             const ForwardOptions& opts = {}) const;

  /// Full pass: L layers then the classifier head. Also returns every node's
  /// chosen order per layer for diagnostics.
  ModelForward forward(const Value& x, const HopIndex& hops,
                       std::uint64_t sample_seed,
                       const ForwardOptions& opts = {}) const;

  const NolGatConfig& config() const { return config_; }
  int gamma_size() const { return gamma_size_; }

  /// Effective sampling temperature for an epoch under the optional linear
  /// anneal from the configured value down to 0.1 at the final epoch.
  static double annealed_temperature(const NolGatConfig& config,
                                     std::uint64_t epoch,
                                     std::uint64_t total_epochs);

 private:
  Neighborhoods order_neighborhoods(const HopIndex& hops, int order) const;
  SupportMask support_mask(const HopIndex& hops, std::size_t v) const;

  NolGatConfig config_;
  int in_dim_ = 0;
  int gamma_size_ = 0;
  std::vector<GatV2Layer> phi_;
  std::vector<GatV2Layer> psi_;
  std::optional<Mlp> head_;
};

}  // namespace nolgat
