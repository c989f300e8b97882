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

namespace focusrank {

// Principal component model. Component rows are orthonormal; variances are
// the matching eigenvalues of the sample covariance (divisor n - 1), sorted
// non-increasing. The sign of each component is fixed so that its
// largest-magnitude entry (first such entry on ties) is positive, making fits
// bit-reproducible.
struct PcaModel {
  std::vector<double> mean;      // length d
  Matrix components;             // k x d, rows are principal directions
  std::vector<double> variances; // length k, non-increasing
};

// Fits the top out_dim principal directions of mean-centered data via Jacobi
// eigendecomposition of the covariance. Requires n >= 2 and
// 1 <= out_dim <= min(n, d).
PcaModel pca_fit(const Matrix& data, std::size_t out_dim);

// Projects rows of data: result = (X - 1 mean^T) C^T, shape n x k.
Matrix pca_transform(const PcaModel& model, const Matrix& data);

}  // namespace focusrank
