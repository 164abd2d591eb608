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
#include <vector>

#include "nolgat/rng.hpp"

namespace nolgat {

// Categorical selection over the neighborhood orders 0..max_order with
// Gumbel-max sampling and its Gumbel-Softmax relaxation. Orders for which a
// node has no neighbors are masked at the logit level, so they receive exactly
// zero relaxed score and zero gradient.

/// Additive logit penalty for unsupported orders: large enough that
/// exp((x - kMaskedLogit)/t) underflows to exactly 0 for any sane t.
inline constexpr double kMaskedLogit = -1e30;

/// Which hop orders are available for one node. Order 0 (self) is always
/// supported, so the mask is never empty.
struct SupportMask {
  std::vector<char> supported;  // size |Gamma|; supported[0] always true

  static SupportMask all(std::size_t size) {
    return SupportMask{std::vector<char>(size, 1)};
  }
  std::size_t size() const { return supported.size(); }
  bool operator[](std::size_t i) const { return supported[i] != 0; }
};

/// Result of one straight-through draw: the hard one-hot choice consumed by
/// the forward pass and the relaxed scores the backward pass substitutes.
/// Both come from the same perturbed logits, so argmax(relaxed) == chosen.
struct STSample {
  std::vector<double> hard;     // one-hot at chosen
  std::vector<double> relaxed;  // Gumbel-Softmax scores; masked entries 0
  int chosen = 0;
};

/// Inverse-transform Gumbel(0,1): -log(-log(u)) for u in the open interval
/// (0,1). Values outside the open interval are rejected.
double gumbel_noise(double u);

/// softmax((log_probs + noise) / temperature) restricted to supported
/// entries. Masked entries get exactly 0. temperature must be positive.
std::vector<double> gumbel_softmax(std::span<const double> log_probs,
                                   std::span<const double> noise,
                                   double temperature, const SupportMask& mask);

/// Draws fresh Gumbel noise per entry from rng, picks the supported argmax of
/// the perturbed logits (hard), and computes the relaxed scores from the same
/// perturbation.
STSample st_sample(std::span<const double> log_probs, double temperature,
                   const SupportMask& mask, RngStream& rng);

/// As st_sample but with caller-provided noise; this is the path the model
/// uses so that the differentiable relaxation sees identical perturbations.
STSample st_sample_with_noise(std::span<const double> log_probs,
                              std::span<const double> noise, double temperature,
                              const SupportMask& mask);

}  // namespace nolgat
