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
#include "focusrank/kmeans.hpp"

#include <stdexcept>
#include <vector>

#include "focusrank/kernels.hpp"
#include "focusrank/mlp.hpp"
#include "focusrank/rng.hpp"

namespace focusrank {

namespace {

// k-means++ seeding: centers drawn proportional to squared distance from the
// nearest already-chosen center. If every remaining point coincides with a
// center, the lowest-index unchosen point is taken.
Matrix kmeanspp_init(const Matrix& data, std::size_t k, SplitMix64& rng) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  Matrix centers(k, d);
  std::vector<bool> chosen(n, false);

  std::size_t first = static_cast<std::size_t>(rng.uniform_index(n));
  std::copy(data.row(first).begin(), data.row(first).end(), centers.row(0).begin());
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = distance_sq(data.row(i), centers.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double x : d2) total += x;
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.next_double() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // r landed at the top of the prefix sum
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick == n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    std::copy(data.row(pick).begin(), data.row(pick).end(), centers.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = distance_sq(data.row(i), centers.row(c));
      if (dist < d2[i]) d2[i] = dist;
    }
  }
  return centers;
}

}  // namespace

KmeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  if (n == 0) throw std::invalid_argument("kmeans: empty data");
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must be in [1, n]");

  SplitMix64 rng(seed);
  KmeansResult res;
  res.centroids = kmeanspp_init(data, k, rng);

  std::vector<std::size_t> labels, prev_labels;
  std::vector<double> dists;
  std::vector<std::size_t> counts(k);

  for (std::size_t it = 0; it < max_iter; ++it) {
    kernels::assign_clusters(data, res.centroids, labels, dists);
    double inertia = 0.0;
    for (double x : dists) inertia += x;
    res.inertia_history.push_back(inertia);
    res.inertia = inertia;

    if (it > 0 && labels == prev_labels) break;
    prev_labels = labels;
    if (it + 1 == max_iter) break;

    // Update step: centroid = mean of members, accumulated in point order.
    Matrix sums(k, d);
    counts.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = labels[i];
      counts[c] += 1;
      const double* x = data.values.data() + i * d;
      double* s = sums.values.data() + c * d;
      for (std::size_t j = 0; j < d; ++j) s[j] += x[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t j = 0; j < d; ++j) res.centroids(c, j) = sums(c, j) * inv;
    }

    // Repair: each empty cluster takes the point farthest from its own (new)
    // centroid, skipping singleton donors.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        const double dist = distance_sq(data.row(i), res.centroids.row(labels[i]));
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far == n) continue;  // cannot happen while k <= n, kept as a guard
      const std::size_t donor = labels[far];
      std::copy(data.row(far).begin(), data.row(far).end(), res.centroids.row(c).begin());
      labels[far] = c;
      counts[c] = 1;
      counts[donor] -= 1;
      // Recompute the donor centroid over its remaining members.
      std::vector<double> sum(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != donor) continue;
        for (std::size_t j = 0; j < d; ++j) sum[j] += data(i, j);
      }
      const double inv = 1.0 / static_cast<double>(counts[donor]);
      for (std::size_t j = 0; j < d; ++j) res.centroids(donor, j) = sum[j] * inv;
      prev_labels = labels;
    }
  }

  res.assignments = std::move(labels);
  return res;
}

}  // namespace focusrank
