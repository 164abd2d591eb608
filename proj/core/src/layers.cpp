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

#include "nolgat/layers.hpp"

#include "nolgat/errors.hpp"

namespace nolgat {

EdgeList edges_with_self_loops(const Neighborhoods& nbrs) {
  EdgeList e;
  const std::size_t n = nbrs.n();
  e.targets.reserve(nbrs.sources.size() + n);
  e.sources.reserve(nbrs.sources.size() + n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t i = nbrs.offsets[v]; i < nbrs.offsets[v + 1]; ++i) {
      e.targets.push_back(static_cast<std::int32_t>(v));
      e.sources.push_back(nbrs.sources[static_cast<std::size_t>(i)]);
    }
    e.targets.push_back(static_cast<std::int32_t>(v));
    e.sources.push_back(static_cast<std::int32_t>(v));
  }
  return e;
}

GatV2Layer::GatV2Layer(ParamStore& params, const std::string& prefix,
                       GatV2Config config)
    : config_(config) {
  if (config_.heads < 1 || config_.in_dim < 1 || config_.head_dim < 1) {
    throw std::invalid_argument(
        detail::str("GatV2Layer '", prefix, "': invalid config (heads=",
                    config_.heads, ", in=", config_.in_dim,
                    ", head_dim=", config_.head_dim, ")"));
  }
  for (int k = 0; k < config_.heads; ++k) {
    weight_.push_back(params.create(
        detail::str(prefix, "/h", k, "/W"),
        {static_cast<std::size_t>(config_.in_dim),
         static_cast<std::size_t>(config_.head_dim)},
        Init::kGlorotUniform));
    attn_.push_back(params.create(
        detail::str(prefix, "/h", k, "/a"),
        {static_cast<std::size_t>(config_.head_dim), 1},
        Init::kGlorotUniform));
  }
}

std::vector<Value> GatV2Layer::scores(const Value& h,
                                      const EdgeList& edges) const {
  if (h->cols() != static_cast<std::size_t>(config_.in_dim)) {
    throw std::invalid_argument(detail::str(
        "gatv2_scores: input width ", h->cols(), ", layer expects ",
        config_.in_dim));
  }
  std::vector<Value> out;
  out.reserve(weight_.size());
  for (std::size_t k = 0; k < weight_.size(); ++k) {
    Value wh = matmul(h, weight_[k]);
    Value tgt = gather_rows(wh, edges.targets);
    Value src = gather_rows(wh, edges.sources);
    out.push_back(matmul(leaky_relu(add(tgt, src), 0.2), attn_[k]));
  }
  return out;
}

Value GatV2Layer::forward(const Value& h, const Neighborhoods& nbrs) const {
  if (h->cols() != static_cast<std::size_t>(config_.in_dim)) {
    throw std::invalid_argument(detail::str(
        "gatv2_forward: input width ", h->cols(), ", layer expects ",
        config_.in_dim));
  }
  const EdgeList edges = edges_with_self_loops(nbrs);

  std::vector<Value> heads;
  heads.reserve(weight_.size());
  for (std::size_t k = 0; k < weight_.size(); ++k) {
    Value wh = matmul(h, weight_[k]);
    Value tgt = gather_rows(wh, edges.targets);
    Value src = gather_rows(wh, edges.sources);
    Value logits = matmul(leaky_relu(add(tgt, src), 0.2), attn_[k]);
    Value alpha = segment_softmax(logits, edges.targets);
    Value weighted = mul(src, alpha);
    Value agg = segment_sum(weighted, edges.targets);
    heads.push_back(elu(agg));
  }
  if (heads.size() == 1) return heads[0];
  if (config_.concat_heads) return concat_cols(heads);
  Value acc = heads[0];
  for (std::size_t k = 1; k < heads.size(); ++k) acc = add(acc, heads[k]);
  return scalar_mul(acc, 1.0 / static_cast<double>(heads.size()));
}

Mlp::Mlp(ParamStore& params, const std::string& prefix, int in_dim,
         const std::vector<int>& hidden_widths) {
  std::vector<int> widths = hidden_widths;
  widths.push_back(1);
  int prev = in_dim;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    weights_.push_back(params.create(
        detail::str(prefix, "/w", i),
        {static_cast<std::size_t>(prev), static_cast<std::size_t>(widths[i])},
        Init::kGlorotUniform));
    biases_.push_back(params.create(detail::str(prefix, "/b", i),
                                    {static_cast<std::size_t>(widths[i])},
                                    Init::kZeros));
    prev = widths[i];
  }
}

Value Mlp::forward(const Value& h) const {
  Value cur = h;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    cur = add(matmul(cur, weights_[i]), biases_[i]);
    if (i + 1 < weights_.size()) cur = elu(cur);
  }
  return sigmoid(cur);
}

}  // namespace nolgat
