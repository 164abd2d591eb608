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
#include <span>
#include <string>
#include <vector>

namespace nolgat {

/// Dense node features, one row per node, row-major.
struct FeatureMatrix {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> rows;  // n * dim

  std::span<const double> row(std::size_t i) const {
    return {rows.data() + i * dim, dim};
  }
};

/// Undirected graph in compressed row form. Adjacency is symmetric, stores no
/// self-loops or duplicates, and column indices are sorted within each row.
struct SparseGraph {
  std::size_t n = 0;
  std::vector<std::int64_t> row_offsets;   // n + 1
  std::vector<std::int32_t> col_indices;

  std::span<const std::int32_t> neighbors(std::size_t v) const {
    return {col_indices.data() + row_offsets[v],
            static_cast<std::size_t>(row_offsets[v + 1] - row_offsets[v])};
  }
  std::size_t edge_count() const { return col_indices.size() / 2; }
};

/// Exact-distance neighborhoods: lists[r-1] holds, for every node, the nodes
/// at shortest-path distance exactly r, for r = 1..max_order. Order 0 is the
/// node itself and is not stored.
struct HopIndex {
  struct OrderLists {
    std::vector<std::int64_t> offsets;  // n + 1
    std::vector<std::int32_t> nodes;    // sorted within each row
  };

  std::size_t n = 0;
  int max_order = 0;                    // min(effective_diameter, cap)
  int effective_diameter = 0;          // max finite eccentricity
  std::vector<std::int32_t> eccentricity;  // per node, finite distances only
  std::vector<OrderLists> lists;       // size max_order

  /// Nodes at distance exactly r from v, sorted. r = 0 yields the empty list
  /// (self handled by the aggregation's self-loop). r outside [0, max_order]
  /// throws.
  std::span<const std::int32_t> khop_neighbors(std::size_t v, int r) const;
};

/// Binary-labeled dataset over graph nodes. Ground-truth labels of unlabeled
/// nodes are retained for evaluation only; training must consult labeled_mask.
struct Dataset {
  FeatureMatrix features;
  std::vector<std::int8_t> labels;    // {0,1} per node
  std::vector<char> labeled_mask;     // true => label observed
  std::vector<std::string> ids;
};

/// Builds the undirected KNN cosine-similarity graph: each node proposes
/// directed edges to its k most similar peers (ties broken toward the smaller
/// node index) and the union of proposals is symmetrized. Rejects k >= n and
/// zero-norm feature rows.
SparseGraph build_knn_graph(const FeatureMatrix& features, std::size_t k);

/// BFS from every source. Exact distances; disconnected graphs allowed
/// (unreachable pairs are simply absent from every order). The cap bounds
/// memory: orders beyond it are not materialized.
HopIndex build_hop_index(const SparseGraph& g, int max_order_cap);

/// Writes "u<TAB>v" per edge with u < v, sorted, for external inspection.
void write_edge_list(const SparseGraph& g, const std::string& path);

/// Builds a CSR graph from an undirected edge list (validates range,
/// ignores duplicates and self-loops).
SparseGraph graph_from_edges(
    std::size_t n, const std::vector<std::pair<std::int32_t, std::int32_t>>& edges);

}  // namespace nolgat
