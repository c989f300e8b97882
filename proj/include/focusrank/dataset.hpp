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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "focusrank/matrix.hpp"
#include "focusrank/rng.hpp"

namespace focusrank {

// Feature vectors with dense class ids in [0, num_classes). Every class id
// occurs at least once.
struct LabeledDataset {
  Matrix features;                  // n x d_in
  std::vector<std::size_t> labels;  // length n
  std::size_t num_classes = 0;

  std::size_t size() const { return features.rows; }
  std::size_t dim() const { return features.cols; }
};

// Knobs for the synthetic corpus. Each class is a Gaussian prototype; each
// instance is the prototype pushed through per-instance gain, plane
// rotations, a constant offset, a smooth multiplicative "wrinkle" and white
// noise, mimicking scale/orientation/illumination/wrinkle variation of
// photographed fabric swatches.
struct SyntheticConfig {
  std::size_t n_classes = 120;
  std::size_t instances_min = 5;
  std::size_t instances_max = 10;
  std::size_t d_in = 32;
  double gain_min = 0.3;
  double gain_max = 2.0;
  double bias_min = -1.0;
  double bias_max = 1.0;
  std::size_t rotation_planes = 8;
  double rotation_max_angle = 0.7;
  double wrinkle_amplitude = 0.4;
  double noise_sigma = 0.05;
  std::uint64_t seed = 1;
};

// One Givens rotation in the (i, j) coordinate plane.
struct PlaneRotation {
  std::size_t i = 0;
  std::size_t j = 0;
  double angle = 0.0;
};

std::vector<PlaneRotation> sample_rotation(std::size_t dim, std::size_t planes,
                                           double max_angle, SplitMix64& rng);
void apply_rotation(const std::vector<PlaneRotation>& rot, std::span<double> v);

// instance = gain * (R prototype) + bias * 1 + wrinkle .* prototype + noise.
// Bit-reproducible per seed.
LabeledDataset generate_synthetic(const SyntheticConfig& cfg);

// Random class-level partition: floor(K/2) classes to train, the rest to
// test; labels re-densified on each side. No class appears on both sides.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& dataset,
                                                           SplitMix64& rng);

// Text format, exact round trip:
//   focusrank-dataset v1
//   n d K
//   n lines: label v1 ... vd   (floats, 17 significant digits)
void save_dataset(const LabeledDataset& dataset, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

}  // namespace focusrank
