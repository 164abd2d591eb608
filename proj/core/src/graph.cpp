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

#include "nolgat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "nolgat/errors.hpp"

namespace nolgat {

std::span<const std::int32_t> HopIndex::khop_neighbors(std::size_t v,
                                                       int r) const {
  if (r < 0 || r > max_order) {
    throw std::invalid_argument(detail::str(
        "khop_neighbors: order ", r, " outside [0, ", max_order, "]"));
  }
  if (r == 0) return {};
  const OrderLists& ol = lists[static_cast<std::size_t>(r) - 1];
  return {ol.nodes.data() + ol.offsets[v],
          static_cast<std::size_t>(ol.offsets[v + 1] - ol.offsets[v])};
}

SparseGraph build_knn_graph(const FeatureMatrix& features, std::size_t k) {
  const std::size_t n = features.n;
  if (n < 2 || k < 1 || k >= n) {
    throw DataError(detail::str("build_knn_graph: need 1 <= k < n, got k=", k,
                                " n=", n));
  }
  std::vector<double> inv_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : features.row(i)) s += v * v;
    if (s == 0.0) {
      throw DataError(
          detail::str("build_knn_graph: zero feature row at node ", i));
    }
    inv_norm[i] = 1.0 / std::sqrt(s);
  }

  // Brute-force all-pairs cosine similarity; deterministic and exact.
  std::vector<std::vector<std::int32_t>> picks(n);
  std::vector<std::pair<double, std::int32_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    cand.reserve(n - 1);
    const std::span<const double> xi = features.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const std::span<const double> xj = features.row(j);
      double dot = 0.0;
      for (std::size_t t = 0; t < features.dim; ++t) dot += xi[t] * xj[t];
      cand.emplace_back(dot * inv_norm[i] * inv_norm[j],
                        static_cast<std::int32_t>(j));
    }
    // Highest similarity first; equal similarities break toward the smaller
    // node index.
    std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(k),
                      cand.end(), [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    picks[i].reserve(k);
    for (std::size_t t = 0; t < k; ++t) picks[i].push_back(cand[t].second);
  }

  // Union symmetrization: (i,j) exists if either endpoint picked the other.
  std::vector<std::vector<std::int32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::int32_t j : picks[i]) {
      adj[i].push_back(j);
      adj[static_cast<std::size_t>(j)].push_back(static_cast<std::int32_t>(i));
    }
  }
  SparseGraph g;
  g.n = n;
  g.row_offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    g.row_offsets[i + 1] = g.row_offsets[i] + static_cast<std::int64_t>(adj[i].size());
  }
  g.col_indices.reserve(static_cast<std::size_t>(g.row_offsets[n]));
  for (std::size_t i = 0; i < n; ++i) {
    g.col_indices.insert(g.col_indices.end(), adj[i].begin(), adj[i].end());
  }
  return g;
}

HopIndex build_hop_index(const SparseGraph& g, int max_order_cap) {
  if (max_order_cap < 1) {
    throw std::invalid_argument("build_hop_index: max_order_cap must be >= 1");
  }
  const std::size_t n = g.n;
  HopIndex idx;
  idx.n = n;
  idx.eccentricity.assign(n, 0);

  // First pass: per-source BFS distances, collecting nodes per exact order.
  std::vector<std::vector<std::vector<std::int32_t>>> per_order(n);
  std::vector<std::int32_t> dist(n);
  int diameter = 0;
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    std::vector<std::int32_t> frontier{static_cast<std::int32_t>(src)};
    std::vector<std::int32_t> next;
    int depth = 0;
    auto& orders = per_order[src];
    while (!frontier.empty()) {
      ++depth;
      next.clear();
      for (std::int32_t u : frontier) {
        for (std::int32_t w : g.neighbors(static_cast<std::size_t>(u))) {
          if (dist[w] < 0) {
            dist[w] = depth;
            next.push_back(w);
          }
        }
      }
      if (!next.empty()) {
        idx.eccentricity[src] = depth;
        if (depth <= max_order_cap) {
          std::vector<std::int32_t> layer = next;
          std::sort(layer.begin(), layer.end());
          orders.push_back(std::move(layer));
        }
      }
      frontier.swap(next);
    }
    diameter = std::max(diameter, static_cast<int>(idx.eccentricity[src]));
  }
  idx.effective_diameter = diameter;
  idx.max_order = std::min(diameter, max_order_cap);

  idx.lists.resize(static_cast<std::size_t>(idx.max_order));
  for (int r = 1; r <= idx.max_order; ++r) {
    auto& ol = idx.lists[static_cast<std::size_t>(r) - 1];
    ol.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t cnt = per_order[v].size() >= static_cast<std::size_t>(r)
                                  ? per_order[v][static_cast<std::size_t>(r) - 1].size()
                                  : 0;
      ol.offsets[v + 1] = ol.offsets[v] + static_cast<std::int64_t>(cnt);
    }
    ol.nodes.reserve(static_cast<std::size_t>(ol.offsets[n]));
    for (std::size_t v = 0; v < n; ++v) {
      if (per_order[v].size() >= static_cast<std::size_t>(r)) {
        const auto& layer = per_order[v][static_cast<std::size_t>(r) - 1];
        ol.nodes.insert(ol.nodes.end(), layer.begin(), layer.end());
      }
    }
  }
  return idx;
}

void write_edge_list(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError(detail::str("cannot open '", path, "' for writing"));
  }
  for (std::size_t u = 0; u < g.n; ++u) {
    for (std::int32_t v : g.neighbors(u)) {
      if (static_cast<std::size_t>(v) > u) {
        out << u << '\t' << v << '\n';
      }
    }
  }
}

SparseGraph graph_from_edges(
    std::size_t n,
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges) {
  std::vector<std::vector<std::int32_t>> adj(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
        static_cast<std::size_t>(v) >= n) {
      throw DataError(detail::str("edge (", u, ",", v, ") out of range for n=", n));
    }
    if (u == v) continue;
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  SparseGraph g;
  g.n = n;
  g.row_offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    g.row_offsets[i + 1] = g.row_offsets[i] + static_cast<std::int64_t>(adj[i].size());
  }
  for (std::size_t i = 0; i < n; ++i) {
    g.col_indices.insert(g.col_indices.end(), adj[i].begin(), adj[i].end());
  }
  return g;
}

}  // namespace nolgat
