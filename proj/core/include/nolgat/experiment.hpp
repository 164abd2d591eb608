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
#include "nolgat/metrics.hpp"
#include "nolgat/train.hpp"

namespace nolgat {

/// One training run within an experiment. Baseline co-runs share the seed,
/// split, and graph of their paired model run.
struct RunRecord {
  std::string model;  // "nolgat" | "baseline"
  std::uint64_t seed = 0;
  std::size_t knn_k = 0;
  double label_fraction = 0.0;
  std::size_t repetition = 0;
  RunMetrics metrics;
  std::vector<double> loss_curve;
};

struct ExperimentResults {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
};

/// featurize -> KNN graph + hop index per k -> per (k, fraction, repetition):
/// stratified split and training, with an optional paired baseline run.
/// Repetitions execute in parallel; results are identical regardless of the
/// worker count.
ExperimentResults run_experiment(const ExperimentConfig& config);

/// As run_experiment but over an already-loaded dataset (used by the
/// synthetic benchmarks and tests). When `graph` is non-null it is used
/// directly instead of building a KNN graph (knn_k is then ignored).
ExperimentResults run_experiment_on(const ExperimentConfig& config,
                                    const Dataset& dataset,
                                    const SparseGraph* graph = nullptr);

/// Deterministic results JSON (see README for the schema); the timestamp is
/// the only field that varies between identical runs.
std::string results_to_json(const ExperimentResults& results,
                            const std::string& timestamp);
void write_results_json(const ExperimentResults& results,
                        const std::string& path);

/// Per-run rows: model, knn_k, label_fraction, repetition, seed, metrics,
/// confusion counts, final loss.
void write_results_csv(const ExperimentResults& results,
                       const std::string& path);

/// Current UTC time as an ISO-8601 string.
std::string iso8601_utc_now();

}  // namespace nolgat
