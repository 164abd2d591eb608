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

#include "nolgat/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "nolgat/autodiff.hpp"
#include "nolgat/errors.hpp"

namespace nolgat {

double gumbel_noise(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument(
        detail::str("gumbel_noise: u must lie in (0,1), got ", u));
  }
  return -std::log(-std::log(u));
}

std::vector<double> gumbel_softmax(std::span<const double> log_probs,
                                   std::span<const double> noise,
                                   double temperature,
                                   const SupportMask& mask) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument(
        detail::str("gumbel_softmax: temperature must be positive, got ",
                    temperature));
  }
  if (log_probs.size() != noise.size() || log_probs.size() != mask.size()) {
    throw std::invalid_argument("gumbel_softmax: size mismatch");
  }
  std::vector<double> z(log_probs.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = mask[i] ? (log_probs[i] + noise[i]) / temperature
                   : kMaskedLogit;
  }
  detail::softmax_inplace(z);
  return z;
}

STSample st_sample_with_noise(std::span<const double> log_probs,
                              std::span<const double> noise, double temperature,
                              const SupportMask& mask) {
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) any |= mask[i];
  if (!any) {
    throw std::invalid_argument("st_sample: empty support");
  }
  STSample s;
  s.relaxed = gumbel_softmax(log_probs, noise, temperature, mask);
  // Hard choice: supported argmax of the same perturbed logits. Dividing by a
  // positive temperature preserves the argmax, so hard and relaxed agree.
  int best = -1;
  double best_v = 0.0;
  for (std::size_t i = 0; i < log_probs.size(); ++i) {
    if (!mask[i]) continue;
    const double v = log_probs[i] + noise[i];
    if (best < 0 || v > best_v) {
      best = static_cast<int>(i);
      best_v = v;
    }
  }
  s.chosen = best;
  s.hard.assign(log_probs.size(), 0.0);
  s.hard[static_cast<std::size_t>(best)] = 1.0;
  return s;
}

STSample st_sample(std::span<const double> log_probs, double temperature,
                   const SupportMask& mask, RngStream& rng) {
  // The stream is consumed once per entry regardless of support, so the
  // positions of later draws do not depend on the mask.
  std::vector<double> noise(log_probs.size());
  for (double& g : noise) g = gumbel_noise(rng.next_open01());
  return st_sample_with_noise(log_probs, noise, temperature, mask);
}

}  // namespace nolgat
