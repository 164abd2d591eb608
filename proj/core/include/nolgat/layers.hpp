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
#include <string>
#include <vector>

#include "nolgat/autodiff.hpp"
#include "nolgat/optim.hpp"

namespace nolgat {

/// Ragged per-target source lists (CSR layout). The layer appends a self-loop
/// for every target internally, so empty lists are fine.
struct Neighborhoods {
  std::vector<std::int64_t> offsets;  // n + 1
  std::vector<std::int32_t> sources;

  std::size_t n() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  static Neighborhoods empty(std::size_t n) {
    return Neighborhoods{std::vector<std::int64_t>(n + 1, 0), {}};
  }
};

/// Flattened (target, source) pairs with targets nondecreasing, ready for
/// segment-softmax grouping.
struct EdgeList {
  std::vector<std::int32_t> targets;
  std::vector<std::int32_t> sources;
};

/// Appends the self-loop (v, v) after each target's sources.
EdgeList edges_with_self_loops(const Neighborhoods& nbrs);

struct GatV2Config {
  int heads = 1;
  int in_dim = 0;
  int head_dim = 0;
  bool concat_heads = true;  // false: average heads
};

/// One GATv2 attention layer over caller-supplied neighborhoods. Scoring is
/// the GATv2 form a^T LeakyReLU(W h_v + W h_u) with slope 0.2 and a shared W
/// (the nonlinearity sits between the joint projection and the attention
/// vector, so attention stays input-dependent); aggregated head outputs pass
/// through ELU and are concatenated or averaged.
class GatV2Layer {
 public:
  GatV2Layer(ParamStore& params, const std::string& prefix, GatV2Config config);

  /// Per-head per-edge attention logits, grouped by target.
  std::vector<Value> scores(const Value& h, const EdgeList& edges) const;

  /// Full layer: attention softmax per target, weighted aggregation, ELU,
  /// head combination. Output width is heads*head_dim when concatenating,
  /// else head_dim.
  Value forward(const Value& h, const Neighborhoods& nbrs) const;

  int out_dim() const {
    return config_.concat_heads ? config_.heads * config_.head_dim
                                : config_.head_dim;
  }
  const GatV2Config& config() const { return config_; }

 private:
  GatV2Config config_;
  std::vector<Value> weight_;  // per head, [in_dim, head_dim]
  std::vector<Value> attn_;    // per head, [2*head_dim, 1]
};

/// Classifier head: ELU hidden layers, logistic output in (0,1).
class Mlp {
 public:
  Mlp(ParamStore& params, const std::string& prefix, int in_dim,
      const std::vector<int>& hidden_widths);

  /// [n, in_dim] -> [n, 1] probabilities.
  Value forward(const Value& h) const;

 private:
  std::vector<Value> weights_;
  std::vector<Value> biases_;
};

/// Hard label from a probability: 1 iff p >= 0.5 (ties toward positive).
inline std::int8_t hard_label(double p) { return p >= 0.5 ? 1 : 0; }

}  // namespace nolgat
