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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "focusrank/matrix.hpp"

namespace focusrank {

struct KmeansResult {
  std::vector<std::size_t> assignments;
  Matrix centroids;                     // k x d
  double inertia = 0.0;                 // sum of squared distances to assigned centroid
  std::vector<double> inertia_history;  // one entry per Lloyd iteration, non-increasing
};

// Lloyd iterations from k-means++ initialization. Deterministic for a fixed
// seed; nearest-centroid ties break toward the lowest centroid index. A
// cluster left empty by an update step is repaired by moving in the point
// currently farthest from its own centroid.
KmeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 100);

}  // namespace focusrank
