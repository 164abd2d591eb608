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

namespace nolgat {

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

/// Metrics over the evaluated subset. The positive / interest class is fake
/// news, label 1. Macro-F1 is the harmonic mean of the macro-averaged
/// precision and recall (not the mean of per-class F1 scores); per-class
/// precision or recall with a zero denominator counts as 0.
struct RunMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double interest_f1 = 0.0;
  Confusion confusion;
};

/// Confusion counts and the three scores over nodes where eval_mask is true.
/// eval_mask must select at least one node.
RunMetrics compute_metrics(std::span<const std::int8_t> predicted,
                           std::span<const std::int8_t> truth,
                           std::span<const char> eval_mask);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

Aggregate aggregate(std::span<const double> values);

}  // namespace nolgat
