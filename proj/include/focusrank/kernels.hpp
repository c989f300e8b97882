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
#include <vector>

#include "focusrank/matrix.hpp"
#include "focusrank/mlp.hpp"

// Hot data-parallel kernels. Each kernel exists twice: the OpenMP version in
// kernels:: and a plain-loop reference in kernels::serial::. Both perform the
// same floating-point operations in the same per-slot order (parallelism is
// only over independent output slots; reductions happen in a fixed group
// order), so the two variants return bit-identical results for any thread
// count. Tests assert that equality; tools/bench_kernels compares their speed.
namespace focusrank::kernels {

// Embeds every row of `inputs` through the network. Row i of the result is
// f(inputs[i]).
Matrix embed_batch(const MlpParams& params, const Matrix& inputs);

// Same, but also captures one ForwardTrace per row for backpropagation.
Matrix embed_batch_traced(const MlpParams& params, const Matrix& inputs,
                          std::vector<ForwardTrace>& traces);

// Sums parameter gradients of <grad_outs[i], f(inputs[i])> over all rows.
// Rows are accumulated serially inside each group [offsets[g], offsets[g+1])
// and group sums are reduced in ascending group order, which pins the
// floating-point result independent of thread count.
MlpGrads backward_grouped(const MlpParams& params, const std::vector<ForwardTrace>& traces,
                          const Matrix& grad_outs, const std::vector<std::size_t>& group_offsets);

// result(i, j) = squared L2 distance between a.row(i) and b.row(j).
Matrix sqdist_matrix(const Matrix& a, const Matrix& b);

// Nearest centroid per point (ties broken by lowest centroid index) plus the
// squared distance to it.
void assign_clusters(const Matrix& data, const Matrix& centroids,
                     std::vector<std::size_t>& labels, std::vector<double>& dists);

// Sample covariance (divisor n - 1) of the rows of `data` around `mean`.
Matrix covariance(const Matrix& data, const std::vector<double>& mean);

namespace serial {

Matrix embed_batch(const MlpParams& params, const Matrix& inputs);
Matrix embed_batch_traced(const MlpParams& params, const Matrix& inputs,
                          std::vector<ForwardTrace>& traces);
MlpGrads backward_grouped(const MlpParams& params, const std::vector<ForwardTrace>& traces,
                          const Matrix& grad_outs, const std::vector<std::size_t>& group_offsets);
Matrix sqdist_matrix(const Matrix& a, const Matrix& b);
void assign_clusters(const Matrix& data, const Matrix& centroids,
                     std::vector<std::size_t>& labels, std::vector<double>& dists);
Matrix covariance(const Matrix& data, const std::vector<double>& mean);

}  // namespace serial

}  // namespace focusrank::kernels
