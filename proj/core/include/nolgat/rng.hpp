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
#include <initializer_list>
#include <string_view>
#include <vector>

namespace nolgat {

// All randomness in the library flows through these keyed counter-based
// streams. Results are bitwise reproducible across platforms and independent
// of evaluation order, which the std <random> distributions do not guarantee.

/// SplitMix64 finalizer: a bijective avalanche mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of two 64-bit keys.
constexpr std::uint64_t key_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

/// Derives a single stream key from a tuple such as (seed, epoch, layer, node).
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t k = 0x243F6A8885A308D3ULL;  // arbitrary nonzero start
  for (std::uint64_t p : parts) k = key_combine(k, p);
  return k;
}

/// FNV-1a hash of a byte string; used for token bucketing and naming keys.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based random stream. Two streams with the same key emit the same
/// sequence; streams with different keys are statistically independent.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(mix64(key)) {}

  static RngStream keyed(std::initializer_list<std::uint64_t> parts) {
    return RngStream(derive_key(parts));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw from the open interval (0, 1); never returns 0 or 1.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform draw from [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    // Multiply-shift bounded draw; bias is < 2^-64 * n, irrelevant here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Deterministic Fisher-Yates shuffle driven by an RngStream.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace nolgat
