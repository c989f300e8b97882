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
#include <vector>

#include "focusrank/matrix.hpp"

namespace focusrank {

// Fully connected embedding network f(x). Hidden layers are ReLU, the final
// layer is linear. All arithmetic is double precision.
struct MlpParams {
  std::vector<std::size_t> layer_dims;      // [d_in, h1, ..., d_emb]
  std::vector<Matrix> weights;              // per layer, out x in
  std::vector<std::vector<double>> biases;  // per layer, out

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
};

// Per-layer pre-activations and activations cached by forward() for one
// input; backward() replays it. act[0] is the input, act[L] the embedding.
struct ForwardTrace {
  std::vector<std::vector<double>> pre;  // L entries
  std::vector<std::vector<double>> act;  // L+1 entries
};

// Parameter gradients, shaped like MlpParams.
struct MlpGrads {
  std::vector<Matrix> d_weights;
  std::vector<std::vector<double>> d_biases;

  void scale(double s);
  void add(const MlpGrads& other);  // element-wise +=
  bool finite() const;
};

// He-scaled Gaussian weights (stddev sqrt(2 / fan_in)), zero biases.
// Deterministic per seed.
MlpParams init_params(const std::vector<std::size_t>& layer_dims, std::uint64_t seed);

MlpGrads zero_grads_like(const MlpParams& params);

// Embeds one input. When trace is non-null it is filled for backward().
std::vector<double> forward(const MlpParams& params, std::span<const double> input,
                            ForwardTrace* trace = nullptr);

// Accumulates into grads the gradient of <grad_out, f(x)> with respect to
// every weight and bias. The ReLU subgradient at 0 is 0.
void backward(const MlpParams& params, const ForwardTrace& trace,
              std::span<const double> grad_out, MlpGrads& grads);

// Squared L2 distance between two equal-length vectors.
double distance_sq(std::span<const double> a, std::span<const double> b);

// Scales a vector to unit L2 norm in place; zero vectors are left unchanged.
// Not used by training or default evaluation; embeddings stay unnormalized.
void l2_normalize(std::span<double> v);

// Text checkpoint format, exact round trip (17 significant digits):
//   focusrank-model v1
//   <layer_dims space-separated>
//   per layer: "W r c" + r rows of c floats, then "b c" + one row of c floats
void save_model(const MlpParams& params, const std::string& path);
MlpParams load_model(const std::string& path);

}  // namespace focusrank
