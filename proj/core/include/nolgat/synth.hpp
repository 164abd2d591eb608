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

#include "nolgat/graph.hpp"

namespace nolgat {

struct SynthTask {
  Dataset dataset;
  SparseGraph graph;
};

/// Long-range benchmark: disjoint paths of 2*distance nodes each, so every
/// node has exactly one partner at shortest-path distance `distance`. Feature
/// column 0 carries the node's own bit (+-1), column 1 is a constant, the
/// rest is seeded noise. A node's label is 1 iff its bit differs from its
/// partner's bit, so the label is independent of everything within
/// distance-1 hops and a model must read the partner's bit to beat chance.
/// Fully labeled; deterministic per seed.
SynthTask synth_longrange(std::size_t n_nodes, int distance,
                          std::uint64_t seed, std::size_t feature_dim = 8);

struct Corpus {
  std::vector<std::string> docs;
  std::vector<std::int8_t> labels;
};

/// Synthetic two-class news-like corpus: each class has its own topical
/// vocabulary on top of a shared one, so same-class documents are more
/// cosine-similar under hashed term frequencies. Deterministic per seed.
Corpus synthetic_corpus(std::size_t n_docs, std::uint64_t seed);

/// Writes docs/labels as the text-corpus pair the hashed-tf loader reads.
void write_corpus(const Corpus& corpus, const std::string& docs_path,
                  const std::string& labels_path);

}  // namespace nolgat
