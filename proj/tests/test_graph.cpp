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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "nolgat/errors.hpp"
#include "nolgat/graph.hpp"
#include "support/oracles.hpp"

using namespace nolgat;

namespace {

FeatureMatrix features_from(std::vector<std::vector<double>> rows) {
  FeatureMatrix fm;
  fm.n = rows.size();
  fm.dim = rows[0].size();
  for (const auto& r : rows) fm.rows.insert(fm.rows.end(), r.begin(), r.end());
  return fm;
}

std::set<std::pair<int, int>> edge_set(const SparseGraph& g) {
  std::set<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < g.n; ++u) {
    for (std::int32_t v : g.neighbors(u)) {
      edges.insert({std::min<int>(u, v), std::max<int>(u, v)});
    }
  }
  return edges;
}

/// 7-node path a-b-c-d-e-f-g as node ids 0..6.
SparseGraph path7() {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::int32_t i = 0; i < 6; ++i) edges.emplace_back(i, i + 1);
  return graph_from_edges(7, edges);
}

}  // namespace

TEST_CASE("knn graph: two well-separated pairs at k=1") {
  FeatureMatrix fm = features_from(
      {{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}, {0.1, 0.9}});
  SparseGraph g = build_knn_graph(fm, 1);
  CHECK(edge_set(g) == std::set<std::pair<int, int>>{{0, 1}, {2, 3}});
}

TEST_CASE("knn graph: n=2 yields the single edge") {
  FeatureMatrix fm = features_from({{1.0, 2.0}, {-3.0, 0.5}});
  SparseGraph g = build_knn_graph(fm, 1);
  CHECK(edge_set(g) == std::set<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("knn graph: duplicate rows pick each other with index tie-break") {
  FeatureMatrix fm =
      features_from({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {5.0, -1.0}});
  SparseGraph g = build_knn_graph(fm, 1);
  // All of 0,1,2 are maximally similar to each other; the tie-break sends
  // 0 -> 1 and both 1 and 2 -> 0. Node 3 prefers whichever duplicate wins on
  // similarity, tie-broken to 0.
  const auto edges = edge_set(g);
  CHECK(edges.count({0, 1}));
  CHECK(edges.count({0, 2}));
  for (std::size_t v = 0; v < 3; ++v) {
    CHECK(!g.neighbors(v).empty());
  }
}

TEST_CASE("knn graph rejects k >= n and zero rows") {
  FeatureMatrix fm = features_from({{1.0, 0.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(build_knn_graph(fm, 2), DataError);
  FeatureMatrix zero = features_from({{1.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}});
  CHECK_THROWS_WITH_AS(build_knn_graph(zero, 1), doctest::Contains("node 1"),
                       DataError);
}

TEST_CASE("knn graph symmetrization can exceed k") {
  // A hub that everyone picks: its degree exceeds k after the union.
  FeatureMatrix fm = features_from({{1.0, 0.0},
                                    {0.99, 0.14},
                                    {0.99, -0.14},
                                    {0.97, 0.24},
                                    {0.97, -0.24}});
  SparseGraph g = build_knn_graph(fm, 1);
  bool any_exceeds = false;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (g.neighbors(v).size() > 1) any_exceeds = true;
  }
  CHECK(any_exceeds);
  // Symmetry invariant.
  for (std::size_t u = 0; u < g.n; ++u) {
    for (std::int32_t v : g.neighbors(u)) {
      const auto nbrs = g.neighbors(static_cast<std::size_t>(v));
      CHECK(std::find(nbrs.begin(), nbrs.end(), static_cast<std::int32_t>(u)) !=
            nbrs.end());
    }
  }
}

TEST_CASE("knn graph is equivariant under node permutation") {
  const std::size_t n = 12;
  auto vals = testing::random_values(n * 3, -1.0, 1.0, 99);
  FeatureMatrix fm;
  fm.n = n;
  fm.dim = 3;
  fm.rows = vals;
  SparseGraph g = build_knn_graph(fm, 3);

  // Apply a permutation to the rows and compare canonical edge sets.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = (i * 5 + 3) % n;
  FeatureMatrix pm;
  pm.n = n;
  pm.dim = 3;
  pm.rows.resize(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) pm.rows[perm[i] * 3 + j] = vals[i * 3 + j];
  }
  SparseGraph pg = build_knn_graph(pm, 3);

  std::set<std::pair<int, int>> mapped;
  for (auto [u, v] : edge_set(g)) {
    const int pu = static_cast<int>(perm[static_cast<std::size_t>(u)]);
    const int pv = static_cast<int>(perm[static_cast<std::size_t>(v)]);
    mapped.insert({std::min(pu, pv), std::max(pu, pv)});
  }
  CHECK(mapped == edge_set(pg));
}

TEST_CASE("hop index on the 7-node path matches the worked example") {
  SparseGraph g = path7();
  HopIndex idx = build_hop_index(g, 8);
  CHECK(idx.effective_diameter == 6);
  CHECK(idx.max_order == 6);
  // End nodes have a nonempty order-6 set.
  CHECK(idx.khop_neighbors(0, 6).size() == 1);
  CHECK(idx.khop_neighbors(0, 6)[0] == 6);
  CHECK(idx.khop_neighbors(6, 6)[0] == 0);
  // a's 3-hop and 4-hop neighbors are d and e.
  CHECK(idx.khop_neighbors(0, 3).size() == 1);
  CHECK(idx.khop_neighbors(0, 3)[0] == 3);
  CHECK(idx.khop_neighbors(0, 4).size() == 1);
  CHECK(idx.khop_neighbors(0, 4)[0] == 4);
  // d sees both ends at order 3.
  const auto d3 = idx.khop_neighbors(3, 3);
  CHECK(std::vector<std::int32_t>(d3.begin(), d3.end()) ==
        std::vector<std::int32_t>{0, 6});
  // Order 0 is empty by definition; out-of-range orders are rejected.
  CHECK(idx.khop_neighbors(3, 0).empty());
  CHECK_THROWS_AS(idx.khop_neighbors(0, 7), std::invalid_argument);
  CHECK_THROWS_AS(idx.khop_neighbors(0, -1), std::invalid_argument);
}

TEST_CASE("complete graph K4 has diameter 1") {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::int32_t u = 0; u < 4; ++u) {
    for (std::int32_t v = u + 1; v < 4; ++v) edges.emplace_back(u, v);
  }
  HopIndex idx = build_hop_index(graph_from_edges(4, edges), 8);
  CHECK(idx.max_order == 1);
  CHECK(idx.effective_diameter == 1);
  for (std::size_t v = 0; v < 4; ++v) {
    CHECK(idx.khop_neighbors(v, 1).size() == 3);
  }
}

TEST_CASE("star graph: center reaches all leaves at order 1") {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::int32_t leaf = 1; leaf < 6; ++leaf) edges.emplace_back(0, leaf);
  HopIndex idx = build_hop_index(graph_from_edges(6, edges), 8);
  CHECK(idx.khop_neighbors(0, 1).size() == 5);
  CHECK(idx.khop_neighbors(1, 2).size() == 4);  // other leaves
  CHECK(idx.effective_diameter == 2);
}

TEST_CASE("order-1 lists equal adjacency rows") {
  SparseGraph g = testing::random_er_graph(30, 0.15, 5);
  HopIndex idx = build_hop_index(g, 8);
  if (idx.max_order >= 1) {
    for (std::size_t v = 0; v < g.n; ++v) {
      const auto row = g.neighbors(v);
      const auto ord1 = idx.khop_neighbors(v, 1);
      CHECK(std::vector<std::int32_t>(row.begin(), row.end()) ==
            std::vector<std::int32_t>(ord1.begin(), ord1.end()));
    }
  }
}

TEST_CASE("hop index matches the boolean-matrix-power oracle on ER graphs") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    for (double p : {0.05, 0.1, 0.3}) {
      const std::size_t n = 8 + (seed * 7) % 40;
      SparseGraph g = testing::random_er_graph(n, p, seed);
      HopIndex idx = build_hop_index(g, 50);
      auto oracle = testing::hop_oracle(g, idx.max_order);
      for (int r = 1; r <= idx.max_order; ++r) {
        for (std::size_t v = 0; v < n; ++v) {
          const auto got = idx.khop_neighbors(v, r);
          CHECK(std::vector<std::int32_t>(got.begin(), got.end()) ==
                oracle[static_cast<std::size_t>(r) - 1][v]);
        }
      }
      ++checked;
    }
  }
  CHECK(checked == 75);
}

TEST_CASE("hop order sets are symmetric, disjoint, and partition components") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    SparseGraph g = testing::random_er_graph(25, 0.12, seed);
    HopIndex idx = build_hop_index(g, 30);
    for (std::size_t v = 0; v < g.n; ++v) {
      std::set<std::int32_t> seen{static_cast<std::int32_t>(v)};
      for (int r = 1; r <= idx.max_order; ++r) {
        for (std::int32_t u : idx.khop_neighbors(v, r)) {
          CHECK(!seen.count(u));  // pairwise disjoint, excludes v
          seen.insert(u);
          // Symmetry: v appears in u's order-r list.
          const auto back = idx.khop_neighbors(static_cast<std::size_t>(u), r);
          CHECK(std::find(back.begin(), back.end(),
                          static_cast<std::int32_t>(v)) != back.end());
        }
      }
      // Partition: the union over r plus v is exactly v's component (BFS).
      std::set<std::int32_t> component;
      std::vector<std::int32_t> stack{static_cast<std::int32_t>(v)};
      while (!stack.empty()) {
        const std::int32_t u = stack.back();
        stack.pop_back();
        if (!component.insert(u).second) continue;
        for (std::int32_t w : g.neighbors(static_cast<std::size_t>(u))) {
          stack.push_back(w);
        }
      }
      CHECK(seen == component);
    }
  }
}

TEST_CASE("max_order_cap bounds the materialized orders") {
  HopIndex idx = build_hop_index(path7(), 3);
  CHECK(idx.effective_diameter == 6);
  CHECK(idx.max_order == 3);
  CHECK_THROWS_AS(idx.khop_neighbors(0, 4), std::invalid_argument);
}

TEST_CASE("disconnected graphs: eccentricity over reachable nodes only") {
  // Two disjoint edges plus one isolated node.
  SparseGraph g = graph_from_edges(5, {{0, 1}, {2, 3}});
  HopIndex idx = build_hop_index(g, 8);
  CHECK(idx.effective_diameter == 1);
  CHECK(idx.eccentricity[4] == 0);
  CHECK(idx.khop_neighbors(4, 1).empty());
  CHECK(idx.khop_neighbors(0, 1).size() == 1);
}

TEST_CASE("edge list export: tab separated, u < v, sorted") {
  SparseGraph g = graph_from_edges(4, {{2, 1}, {0, 3}, {0, 1}});
  const std::string path = "test_edges_out.tsv";
  write_edge_list(g, path);
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  CHECK(lines == std::vector<std::string>{"0\t1", "0\t3", "1\t2"});
  std::filesystem::remove(path);
}
