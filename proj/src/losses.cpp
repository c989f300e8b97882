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
#include "focusrank/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "focusrank/mlp.hpp"

namespace focusrank {

namespace {

void check_unit(const UnitEmbeddings& u) {
  if (u.negatives.empty()) throw std::invalid_argument("focus unit: empty negatives");
  const std::size_t d = u.probe.size();
  if (u.positive.size() != d) throw std::invalid_argument("focus unit: positive length mismatch");
  for (const auto& neg : u.negatives) {
    if (neg.size() != d) throw std::invalid_argument("focus unit: negative length mismatch");
  }
}

}  // namespace

double sigma(double t) {
  if (t >= 0.0) return std::log2(1.0 + std::exp2(-t));
  return -t + std::log2(1.0 + std::exp2(t));
}

double delta(double d_neg, double d_pos) {
  double e = -(d_neg - d_pos);
  e = std::clamp(e, -1020.0, 1020.0);
  return std::exp2(e);
}

double focus_unit_loss(const UnitEmbeddings& u) {
  check_unit(u);
  const double d_pos = distance_sq(u.probe, u.positive);
  double loss = 0.0;
  for (const auto& neg : u.negatives) {
    const double d_neg = distance_sq(u.probe, neg);
    loss += sigma(d_neg - d_pos);
  }
  return loss;
}

FocusUnitResult focus_unit_grads(const UnitEmbeddings& u) {
  check_unit(u);
  const std::size_t d = u.probe.size();
  const std::size_t m = u.negatives.size();

  FocusUnitResult res;
  res.grads.d_probe.assign(d, 0.0);
  res.grads.d_positive.assign(d, 0.0);
  res.grads.d_negatives.assign(m, std::vector<double>(d, 0.0));

  const double d_pos = distance_sq(u.probe, u.positive);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& neg = u.negatives[j];
    const double d_neg = distance_sq(u.probe, neg);
    res.loss += sigma(d_neg - d_pos);

    const double dl = delta(d_neg, d_pos);
    const double scale = -2.0 * dl / (1.0 + dl);
    for (std::size_t i = 0; i < d; ++i) {
      res.grads.d_probe[i] += scale * (u.positive[i] - neg[i]);
      res.grads.d_positive[i] += scale * (u.probe[i] - u.positive[i]);
      res.grads.d_negatives[j][i] = scale * (neg[i] - u.probe[i]);
    }
  }
  return res;
}

std::size_t zero_one_unit_loss(const UnitEmbeddings& u) {
  check_unit(u);
  const double d_pos = distance_sq(u.probe, u.positive);
  std::size_t count = 0;
  for (const auto& neg : u.negatives) {
    if (distance_sq(u.probe, neg) - d_pos < 0.0) ++count;
  }
  return count;
}

PairLossResult contrastive_loss_and_grads(std::span<const double> a, std::span<const double> b,
                                          bool same_label, double margin) {
  if (a.size() != b.size()) throw std::invalid_argument("contrastive: length mismatch");
  if (margin <= 0.0) throw std::invalid_argument("contrastive: margin must be > 0");

  const std::size_t n = a.size();
  PairLossResult res;
  res.d_a.assign(n, 0.0);
  res.d_b.assign(n, 0.0);

  const double dist_sq = distance_sq(a, b);
  if (same_label) {
    res.loss = 0.5 * dist_sq;
    for (std::size_t i = 0; i < n; ++i) {
      res.d_a[i] = a[i] - b[i];
      res.d_b[i] = b[i] - a[i];
    }
    return res;
  }

  const double dist = std::sqrt(dist_sq);
  if (dist >= margin) return res;  // inactive hinge, zero loss and grads
  const double gap = margin - dist;
  res.loss = 0.5 * gap * gap;
  if (dist > 0.0) {
    const double scale = -gap / dist;
    for (std::size_t i = 0; i < n; ++i) {
      res.d_a[i] = scale * (a[i] - b[i]);
      res.d_b[i] = scale * (b[i] - a[i]);
    }
  }
  // dist == 0: the distance itself is non-differentiable; subgradient 0.
  return res;
}

TripletLossResult triplet_loss_and_grads(std::span<const double> anchor,
                                         std::span<const double> pos,
                                         std::span<const double> neg, double margin) {
  if (anchor.size() != pos.size() || anchor.size() != neg.size()) {
    throw std::invalid_argument("triplet: length mismatch");
  }
  if (margin <= 0.0) throw std::invalid_argument("triplet: margin must be > 0");

  const std::size_t n = anchor.size();
  TripletLossResult res;
  res.d_anchor.assign(n, 0.0);
  res.d_pos.assign(n, 0.0);
  res.d_neg.assign(n, 0.0);

  const double hinge = distance_sq(anchor, pos) - distance_sq(anchor, neg) + margin;
  if (hinge <= 0.0) return res;
  res.loss = hinge;
  for (std::size_t i = 0; i < n; ++i) {
    res.d_anchor[i] = 2.0 * (neg[i] - pos[i]);
    res.d_pos[i] = 2.0 * (pos[i] - anchor[i]);
    res.d_neg[i] = 2.0 * (anchor[i] - neg[i]);
  }
  return res;
}

}  // namespace focusrank
