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
#include <utility>
#include <vector>

#include "nolgat/model.hpp"
#include "nolgat/optim.hpp"

namespace nolgat {

/// Everything one experiment needs, loadable from a flat key = value file.
/// Unknown keys are rejected. knn_k and label_fraction accept comma lists and
/// the experiment sweeps their cross product.
struct ExperimentConfig {
  // Featurization.
  std::string featurizer = "precomputed";  // or "hashed-tf"
  std::string data;
  std::string labels;          // hashed-tf only: parallel label file
  std::size_t feature_dim = 500;  // hashed-tf bucket count

  // Graph.
  std::vector<std::size_t> knn_k = {3, 4, 5, 6, 7, 8};
  int max_order_cap = 8;

  // Protocol.
  std::vector<double> label_fraction = {0.1, 0.2, 0.3};
  std::uint64_t epochs = 200;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  bool run_baseline = false;  // paired standard-GATv2 co-run on shared splits

  // Model and optimizer.
  NolGatConfig model;
  bool eval_argmax = false;
  AdamConfig adam;

  // Outputs.
  std::string out_json = "results.json";
  std::string out_csv = "results.csv";
  std::string chosen_orders_csv;  // optional; single-run configs only
  unsigned parallel_runs = 0;     // 0 = hardware concurrency
};

/// Parses and validates a config file. Throws ConfigError with the offending
/// line on any problem, including keys this struct does not define.
ExperimentConfig parse_config_file(const std::string& path);

/// Same, from in-memory text (used by tests and error reporting).
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& context);

/// The resolved configuration as ordered key/value strings, suitable for the
/// results echo; parsing the echo back yields the same configuration.
std::vector<std::pair<std::string, std::string>> config_echo(
    const ExperimentConfig& config);

}  // namespace nolgat
