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
#include <span>
#include <vector>

#include "focusrank/matrix.hpp"

namespace focusrank {

// Embedded members of one focus ranking unit: the probe f(x), its positive
// match f(x+) and the reference set of negatives f(x-).
struct UnitEmbeddings {
  std::vector<double> probe;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;
};

// Gradients of the unit loss with respect to each embedding, shaped like
// UnitEmbeddings.
struct UnitGradients {
  std::vector<double> d_probe;
  std::vector<double> d_positive;
  std::vector<std::vector<double>> d_negatives;
};

// Logistic surrogate sigma(t) = log2(1 + 2^-t). Strictly decreasing, equals
// 1 at t = 0, and upper-bounds the indicator 1(t < 0). Evaluated branch-wise
// so that 2^-t never overflows:
//   t >= 0:  log2(1 + 2^-t)
//   t <  0:  -t + log2(1 + 2^t)
double sigma(double t);

// delta = 2^-(d_neg - d_pos); the exponent is clamped to [-1020, 1020] so the
// power stays finite. Equals 1 exactly when the two distances are equal.
double delta(double d_neg, double d_pos);

// Unit loss: sum over negatives of sigma(D(probe, neg) - D(probe, pos)).
double focus_unit_loss(const UnitEmbeddings& u);

// Unit loss plus analytic gradients in embedding space. The loss is computed
// with the same operation sequence as focus_unit_loss, so both agree
// bit-for-bit. With w_j = -delta_j / (1 + delta_j):
//   d_probe    = 2 sum_j w_j (positive - negative_j)
//   d_positive = 2 sum_j w_j (probe - positive)
//   d_neg_j    = 2 w_j (negative_j - probe)
struct FocusUnitResult {
  double loss = 0.0;
  UnitGradients grads;
};
FocusUnitResult focus_unit_grads(const UnitEmbeddings& u);

// Ranking disorders: number of negatives strictly closer to the probe than
// the positive match.
std::size_t zero_one_unit_loss(const UnitEmbeddings& u);

// Hadsell-style contrastive pair loss on Euclidean distance d:
//   same label:      0.5 d^2
//   different label: 0.5 max(0, margin - d)^2
struct PairLossResult {
  double loss = 0.0;
  std::vector<double> d_a;
  std::vector<double> d_b;
};
PairLossResult contrastive_loss_and_grads(std::span<const double> a, std::span<const double> b,
                                          bool same_label, double margin);

// FaceNet-style triplet hinge on squared distances:
//   max(0, D(anchor, pos) - D(anchor, neg) + margin)
struct TripletLossResult {
  double loss = 0.0;
  std::vector<double> d_anchor;
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};
TripletLossResult triplet_loss_and_grads(std::span<const double> anchor,
                                         std::span<const double> pos,
                                         std::span<const double> neg, double margin);

}  // namespace focusrank
