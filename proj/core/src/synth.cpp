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

#include "nolgat/synth.hpp"

#include <fstream>

#include "nolgat/errors.hpp"
#include "nolgat/rng.hpp"

namespace nolgat {

SynthTask synth_longrange(std::size_t n_nodes, int distance,
                          std::uint64_t seed, std::size_t feature_dim) {
  if (distance < 1) {
    throw std::invalid_argument("synth_longrange: distance must be >= 1");
  }
  const std::size_t path_len = 2 * static_cast<std::size_t>(distance);
  if (n_nodes < 2 * path_len) {
    throw std::invalid_argument(detail::str(
        "synth_longrange: need at least ", 2 * path_len, " nodes for D=",
        distance));
  }
  if (feature_dim < 2) {
    throw std::invalid_argument("synth_longrange: feature_dim must be >= 2");
  }
  const std::size_t n_paths = n_nodes / path_len;
  const std::size_t n = n_paths * path_len;

  RngStream bits = RngStream::keyed({seed, 0x62697473ULL});
  RngStream noise = RngStream::keyed({seed, 0x6e6f6973ULL});

  SynthTask task;
  Dataset& ds = task.dataset;
  ds.features.n = n;
  ds.features.dim = feature_dim;
  ds.features.rows.assign(n * feature_dim, 0.0);
  ds.labels.assign(n, 0);
  ds.labeled_mask.assign(n, 1);
  ds.ids.reserve(n);

  std::vector<std::int8_t> bit(n);
  for (std::size_t v = 0; v < n; ++v) {
    bit[v] = bits.next_u64() & 1 ? 1 : 0;
    double* row = ds.features.rows.data() + v * feature_dim;
    row[0] = bit[v] ? 1.0 : -1.0;
    row[1] = 1.0;
    for (std::size_t j = 2; j < feature_dim; ++j) {
      row[j] = noise.next_uniform(-0.5, 0.5);
    }
    ds.ids.push_back(detail::str("p", v / path_len, "_", v % path_len));
  }

  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  edges.reserve(n - n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const std::size_t base = p * path_len;
    for (std::size_t i = 0; i + 1 < path_len; ++i) {
      edges.emplace_back(static_cast<std::int32_t>(base + i),
                         static_cast<std::int32_t>(base + i + 1));
    }
    for (std::size_t i = 0; i < path_len; ++i) {
      const std::size_t partner =
          i < static_cast<std::size_t>(distance) ? i + distance : i - distance;
      ds.labels[base + i] = bit[base + i] != bit[base + partner] ? 1 : 0;
    }
  }
  task.graph = graph_from_edges(n, edges);
  return task;
}

Corpus synthetic_corpus(std::size_t n_docs, std::uint64_t seed) {
  // Topical vocabularies. Shared words appear in both classes; a document
  // draws most tokens from its class topic with some bleed-through, so the
  // classes overlap but same-class documents stay measurably more similar.
  static const char* kTopicA[] = {
      "election", "senate",  "minister", "policy",  "budget",  "reform",
      "campaign", "congress", "governor", "treaty",  "tariff",  "diplomat",
      "poll",     "ballot",  "coalition", "debate",  "statute", "veto",
      "mandate",  "audit"};
  static const char* kTopicB[] = {
      "galaxy",  "neuron",  "vaccine", "climate", "fossil",   "quantum",
      "genome",  "orbit",   "protein", "reactor", "telescope", "enzyme",
      "glacier", "habitat", "particle", "satellite", "mineral", "bacteria",
      "comet",   "voltage"};
  static const char* kShared[] = {
      "report", "today",  "people", "world", "public", "group",
      "market", "school", "street", "media", "letter", "record"};
  constexpr std::size_t kTopicSize = 20;
  constexpr std::size_t kSharedSize = 12;

  Corpus corpus;
  corpus.docs.reserve(n_docs);
  corpus.labels.reserve(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) {
    const std::int8_t label = i % 2 == 0 ? 0 : 1;
    RngStream rng = RngStream::keyed({seed, 0x636f7270ULL, i});
    const std::size_t len = 40 + rng.next_below(41);  // 40..80 tokens
    std::string doc;
    for (std::size_t t = 0; t < len; ++t) {
      const double u = rng.next_open01();
      const char* word;
      if (u < 0.30) {
        word = (label == 0 ? kTopicA : kTopicB)[rng.next_below(kTopicSize)];
      } else if (u < 0.48) {
        // Bleed-through from the other topic keeps the task non-trivial.
        word = (label == 0 ? kTopicB : kTopicA)[rng.next_below(kTopicSize)];
      } else {
        word = kShared[rng.next_below(kSharedSize)];
      }
      if (t) doc.push_back(' ');
      doc += word;
    }
    corpus.docs.push_back(std::move(doc));
    corpus.labels.push_back(label);
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& docs_path,
                  const std::string& labels_path) {
  std::ofstream docs(docs_path);
  if (!docs) {
    throw DataError(detail::str("cannot open '", docs_path, "' for writing"));
  }
  std::ofstream labels(labels_path);
  if (!labels) {
    throw DataError(detail::str("cannot open '", labels_path, "' for writing"));
  }
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    docs << corpus.docs[i] << '\n';
    labels << static_cast<int>(corpus.labels[i]) << '\n';
  }
}

}  // namespace nolgat
