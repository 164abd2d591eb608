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

#include <string>
#include <vector>

#include "nolgat/config.hpp"
#include "nolgat/graph.hpp"

namespace nolgat {

/// Hashed term-frequency features for one document: lowercase, split on
/// non-alphanumerics, FNV-1a each token into one of dim buckets, then
/// L2-normalize the counts. Deterministic; a document with no tokens is
/// rejected (DataError names doc_id).
std::vector<double> hashed_tf_row(std::string_view text, std::size_t dim,
                                  const std::string& doc_id);

/// Featurizes an in-memory corpus with hashed_tf_row.
FeatureMatrix hashed_tf(const std::vector<std::string>& docs, std::size_t dim);

/// Precomputed-vector dataset: header-bearing CSV with columns
/// id,label,f0..f(d-1). Vectors pass through unchanged.
Dataset load_precomputed_csv(const std::string& path);

/// Raw-text dataset: one document per line plus a parallel label file of
/// 0/1 lines; features come from the hashed-tf featurizer.
Dataset load_text_corpus(const std::string& docs_path,
                         const std::string& labels_path, std::size_t dim);

/// Builds an in-memory corpus dataset (used by synthetic benchmarks).
Dataset dataset_from_corpus(const std::vector<std::string>& docs,
                            const std::vector<std::int8_t>& labels,
                            std::size_t dim);

/// Dispatches on config.featurizer.
Dataset load_dataset(const ExperimentConfig& config);

/// Writes a dataset in the precomputed CSV format.
void write_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace nolgat
