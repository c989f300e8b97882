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
#include <cstddef>
#include <vector>

#include "focusrank/losses.hpp"
#include "focusrank/matrix.hpp"
#include "focusrank/rng.hpp"

namespace focusrank::testutil {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values) v = scale * rng.gaussian();
  return m;
}

// Random unit whose squared distances stay O(1), keeping the delta weights
// away from their saturated extremes.
inline UnitEmbeddings random_unit(std::size_t d_emb, std::size_t n_negatives, SplitMix64& rng) {
  const double scale = 0.5 / std::sqrt(static_cast<double>(d_emb));
  UnitEmbeddings u;
  u.probe.resize(d_emb);
  u.positive.resize(d_emb);
  for (double& v : u.probe) v = scale * rng.gaussian();
  for (double& v : u.positive) v = scale * rng.gaussian();
  u.negatives.assign(n_negatives, std::vector<double>(d_emb));
  for (auto& neg : u.negatives) {
    for (double& v : neg) v = scale * rng.gaussian();
  }
  return u;
}

// Worst |a - b| over a gradient-sized vector, relative to the larger of the
// two vectors' max magnitudes (floored to avoid 0/0).
inline double max_rel_err(const std::vector<double>& a, const std::vector<double>& b,
                          double floor_scale = 1e-8) {
  double scale = floor_scale;
  for (double v : a) scale = std::fmax(scale, std::fabs(v));
  for (double v : b) scale = std::fmax(scale, std::fabs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::fmax(worst, std::fabs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace focusrank::testutil
