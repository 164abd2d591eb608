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

#include "nolgat/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "nolgat/errors.hpp"

namespace nolgat {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

RunMetrics compute_metrics(std::span<const std::int8_t> predicted,
                           std::span<const std::int8_t> truth,
                           std::span<const char> eval_mask) {
  if (predicted.size() != truth.size() || predicted.size() != eval_mask.size()) {
    throw std::invalid_argument("compute_metrics: size mismatch");
  }
  RunMetrics m;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!eval_mask[i]) continue;
    ++total;
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) ++m.confusion.tp;
    else if (!p && !t) ++m.confusion.tn;
    else if (p && !t) ++m.confusion.fp;
    else ++m.confusion.fn;
  }
  if (total == 0) {
    throw std::invalid_argument("compute_metrics: empty evaluation set");
  }
  const auto& c = m.confusion;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);

  // Class 1 (fake, the interest class) and class 0 precision/recall.
  const double p1 = safe_div(static_cast<double>(c.tp),
                             static_cast<double>(c.tp + c.fp));
  const double r1 = safe_div(static_cast<double>(c.tp),
                             static_cast<double>(c.tp + c.fn));
  const double p0 = safe_div(static_cast<double>(c.tn),
                             static_cast<double>(c.tn + c.fn));
  const double r0 = safe_div(static_cast<double>(c.tn),
                             static_cast<double>(c.tn + c.fp));

  const double p_macro = 0.5 * (p0 + p1);
  const double r_macro = 0.5 * (r0 + r1);
  m.macro_f1 = safe_div(2.0 * p_macro * r_macro, p_macro + r_macro);
  m.interest_f1 = safe_div(2.0 * p1 * r1, p1 + r1);
  return m;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stddev = std::sqrt(ss / static_cast<double>(values.size()));
  return a;
}

}  // namespace nolgat
