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

// An independently coded plain GATv2 stack + MLP classifier over dense
// test-side structures. Reads parameters from a ParamStore by name and uses
// none of the library's forward machinery.

#pragma once

#include <cmath>
#include <vector>

#include "nolgat/errors.hpp"
#include "nolgat/graph.hpp"
#include "nolgat/model.hpp"
#include "support/oracles.hpp"

namespace nolgat::testing {

/// Full forward of a standard L-layer GATv2 (1-hop neighborhoods with
/// self-loops) followed by the MLP head, mirroring the psi/mlp parameters of
/// a baseline-mode model built from the same store.
inline std::vector<double> plain_gatv2_stack(const ParamStore& ps,
                                             const NolGatConfig& cfg,
                                             const SparseGraph& graph,
                                             const std::vector<double>& x,
                                             std::size_t in_dim) {
  const std::size_t n = graph.n;
  std::vector<std::vector<std::int32_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto row = graph.neighbors(v);
    adj[v].assign(row.begin(), row.end());
  }
  std::vector<double> h = x;
  std::size_t width = in_dim;
  for (int l = 0; l < cfg.layers; ++l) {
    const bool last = l == cfg.layers - 1;
    const int heads = cfg.heads[static_cast<std::size_t>(l)];
    const std::size_t head_dim = static_cast<std::size_t>(
        last ? cfg.hidden[static_cast<std::size_t>(l)]
             : cfg.hidden[static_cast<std::size_t>(l)] / heads);
    std::vector<DenseGatHead> hs;
    for (int k = 0; k < heads; ++k) {
      DenseGatHead dh;
      dh.weight = ps.at(detail::str("psi", l, "/h", k, "/W"))->data;
      dh.attn = ps.at(detail::str("psi", l, "/h", k, "/a"))->data;
      hs.push_back(std::move(dh));
    }
    h = dense_gatv2_forward(h, n, width, hs, head_dim, adj, !last);
    width = static_cast<std::size_t>(cfg.hidden[static_cast<std::size_t>(l)]);
  }
  std::vector<int> widths = cfg.mlp_hidden;
  widths.push_back(1);
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const auto& w = ps.at(detail::str("mlp/w", i))->data;
    const auto& b = ps.at(detail::str("mlp/b", i))->data;
    const std::size_t out_w = static_cast<std::size_t>(widths[i]);
    std::vector<double> next(n * out_w);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t j = 0; j < out_w; ++j) {
        double acc = b[j];
        for (std::size_t t = 0; t < width; ++t) {
          acc += h[v * width + t] * w[t * out_w + j];
        }
        if (i + 1 < widths.size()) {
          acc = acc > 0 ? acc : std::expm1(acc);
        } else {
          acc = acc >= 0 ? 1.0 / (1.0 + std::exp(-acc))
                         : std::exp(acc) / (1.0 + std::exp(acc));
        }
        next[v * out_w + j] = acc;
      }
    }
    h = std::move(next);
    width = out_w;
  }
  return h;
}

}  // namespace nolgat::testing
