/*
 * Copyright 2026 The FocusRank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <cstdint>

namespace focusrank {

// Counter-based 64-bit generator (splitmix64). Every random choice in the
// library flows through this generator so that a seed fully determines the
// run. The exact stream is part of the file-format/reproducibility contract:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// next_double() uses the top 53 bits, giving a uniform double in [0, 1).
// gaussian() consumes exactly two uniforms (Box-Muller, cosine branch).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform index in [0, n). Modulo bias is < n / 2^64, far below anything a
  // statistical test at our sample sizes can see.
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  double gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1]: keeps log() finite
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derived independent stream. Advances this generator by one draw, so
  // successive forks differ even with equal tags.
  SplitMix64 fork(std::uint64_t tag) {
    return SplitMix64(next_u64() ^ (tag * 0xBF58476D1CE4E5B9ULL));
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace focusrank
