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

#include <benchmark/benchmark.h>

#include "nolgat/featurize.hpp"
#include "nolgat/graph.hpp"
#include "nolgat/rng.hpp"
#include "nolgat/synth.hpp"

namespace {

using namespace nolgat;

FeatureMatrix random_features(std::size_t n, std::size_t dim) {
  FeatureMatrix fm;
  fm.n = n;
  fm.dim = dim;
  fm.rows.resize(n * dim);
  RngStream rng = RngStream::keyed({17});
  for (double& v : fm.rows) v = rng.next_uniform(-1.0, 1.0);
  return fm;
}

void BM_BuildKnnGraph(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  FeatureMatrix fm = random_features(n, 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_knn_graph(fm, 6));
  }
}
BENCHMARK(BM_BuildKnnGraph)->Arg(250)->Arg(500)->Arg(1000)
    ->Unit(benchmark::kMillisecond);

void BM_BuildHopIndex(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  FeatureMatrix fm = random_features(n, 64);
  SparseGraph g = build_knn_graph(fm, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_hop_index(g, 8));
  }
}
BENCHMARK(BM_BuildHopIndex)->Arg(500)->Arg(1000)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

void BM_HashedTf(benchmark::State& state) {
  const Corpus corpus = synthetic_corpus(500, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hashed_tf(corpus.docs, 500));
  }
}
BENCHMARK(BM_HashedTf)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
