// Copyright 2026 The rmdp-lp Authors.
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

namespace rmdp {

/// SplitMix64 (Steele, Lea & Flood). Small state, cheap to split, and its
/// finalizer doubles as the hash used to derive keyed substreams.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as an argument to log().
  constexpr double uniform_open_low() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the stream owned by `key` under `seed`. Distinct keys give
/// statistically independent streams; order of derivation does not matter.
constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                       std::uint64_t key) noexcept {
  return SplitMix64::mix(SplitMix64::mix(seed ^ 0x6A09E667F3BCC909ULL) +
                         SplitMix64::mix(key + 0x9E3779B97F4A7C15ULL));
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k1,
                                       std::uint64_t k2) noexcept {
  return substream_seed(substream_seed(seed, k1), k2);
}

}  // namespace rmdp
