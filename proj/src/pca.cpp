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
#include "focusrank/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "focusrank/kernels.hpp"

namespace focusrank {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Rotations are
// applied until the largest off-diagonal magnitude drops below
// 1e-12 * frobenius_norm, or 100 * d sweeps have run. Returns eigenvalues on
// the diagonal of `a`; columns of `v` are the eigenvectors.
void jacobi_eigen(Matrix& a, Matrix& v) {
  const std::size_t d = a.rows;
  v = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  double fro = 0.0;
  for (double x : a.values) fro += x * x;
  fro = std::sqrt(fro);
  const double tol = 1e-12 * std::max(fro, 1e-300);

  const std::size_t max_sweeps = 100 * d;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) off = std::max(off, std::fabs(a(p, q)));
    }
    if (off <= tol) break;

    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= tol) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        // Stable tangent of the rotation angle
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t i = 0; i < d; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = a(p, i);
          const double aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
}

}  // namespace

PcaModel pca_fit(const Matrix& data, std::size_t out_dim) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");
  if (out_dim < 1 || out_dim > std::min(n, d)) {
    throw std::invalid_argument("pca_fit: out_dim must be in [1, min(n, d)]");
  }
  if (!all_finite(data)) throw std::invalid_argument("pca_fit: non-finite data");

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += data(i, j);
  }
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix cov = kernels::covariance(data, model.mean);
  Matrix v;
  jacobi_eigen(cov, v);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cov(a, a) > cov(b, b); });

  model.components = Matrix(out_dim, d);
  model.variances.resize(out_dim);
  for (std::size_t k = 0; k < out_dim; ++k) {
    const std::size_t col = order[k];
    model.variances[k] = std::max(cov(col, col), 0.0);
    // Sign convention: first largest-magnitude entry made positive
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double mag = std::fabs(v(j, col));
      if (mag > best) {
        best = mag;
        arg = j;
      }
    }
    const double flip = v(arg, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) model.components(k, j) = flip * v(j, col);
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& data) {
  const std::size_t d = model.mean.size();
  if (data.cols != d) throw std::invalid_argument("pca_transform: dimension mismatch");
  const std::size_t k = model.components.rows;
  Matrix out(data.rows, k);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        s += (data(i, j) - model.mean[j]) * model.components(c, j);
      }
      out(i, c) = s;
    }
  }
  return out;
}

}  // namespace focusrank
