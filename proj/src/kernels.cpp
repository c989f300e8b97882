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
#include "focusrank/kernels.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace focusrank::kernels {

namespace {

void check_embed_inputs(const MlpParams& params, const Matrix& inputs) {
  if (inputs.cols != params.input_dim()) {
    throw std::invalid_argument("embed_batch: input width does not match model input dim");
  }
  if (!all_finite(inputs)) throw std::invalid_argument("embed_batch: non-finite inputs");
}

void check_grouped_inputs(const std::vector<ForwardTrace>& traces, const Matrix& grad_outs,
                          const std::vector<std::size_t>& offsets) {
  if (grad_outs.rows != traces.size()) {
    throw std::invalid_argument("backward_grouped: traces/grad_outs size mismatch");
  }
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != traces.size()) {
    throw std::invalid_argument("backward_grouped: bad group offsets");
  }
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    if (offsets[g] > offsets[g + 1]) throw std::invalid_argument("backward_grouped: offsets not sorted");
  }
}

// One group's accumulation: rows in order, left to right.
void accumulate_group(const MlpParams& params, const std::vector<ForwardTrace>& traces,
                      const Matrix& grad_outs, std::size_t begin, std::size_t end,
                      MlpGrads& out) {
  for (std::size_t m = begin; m < end; ++m) {
    backward(params, traces[m], grad_outs.row(m), out);
  }
}

void assign_point(const Matrix& data, const Matrix& centroids, std::size_t i,
                  std::vector<std::size_t>& labels, std::vector<double>& dists) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_c = 0;
  const double* x = data.values.data() + i * data.cols;
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double* mu = centroids.values.data() + c * centroids.cols;
    double s = 0.0;
    for (std::size_t j = 0; j < data.cols; ++j) {
      const double d = x[j] - mu[j];
      s += d * d;
    }
    if (s < best) {
      best = s;
      best_c = c;
    }
  }
  labels[i] = best_c;
  dists[i] = best;
}

double covariance_entry(const Matrix& data, const std::vector<double>& mean, std::size_t i,
                        std::size_t j) {
  double s = 0.0;
  for (std::size_t n = 0; n < data.rows; ++n) {
    s += (data(n, i) - mean[i]) * (data(n, j) - mean[j]);
  }
  return s / static_cast<double>(data.rows - 1);
}

}  // namespace

Matrix embed_batch(const MlpParams& params, const Matrix& inputs) {
  check_embed_inputs(params, inputs);
  Matrix out(inputs.rows, params.output_dim());
  const std::int64_t n = static_cast<std::int64_t>(inputs.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::vector<double> e = forward(params, inputs.row(static_cast<std::size_t>(i)));
    std::copy(e.begin(), e.end(), out.row(static_cast<std::size_t>(i)).begin());
  }
  return out;
}

Matrix embed_batch_traced(const MlpParams& params, const Matrix& inputs,
                          std::vector<ForwardTrace>& traces) {
  check_embed_inputs(params, inputs);
  Matrix out(inputs.rows, params.output_dim());
  traces.assign(inputs.rows, {});
  const std::int64_t n = static_cast<std::int64_t>(inputs.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const std::vector<double> e = forward(params, inputs.row(k), &traces[k]);
    std::copy(e.begin(), e.end(), out.row(k).begin());
  }
  return out;
}

MlpGrads backward_grouped(const MlpParams& params, const std::vector<ForwardTrace>& traces,
                          const Matrix& grad_outs, const std::vector<std::size_t>& group_offsets) {
  check_grouped_inputs(traces, grad_outs, group_offsets);
  const std::size_t n_groups = group_offsets.size() - 1;
  std::vector<MlpGrads> partial(n_groups);
  const std::int64_t g_count = static_cast<std::int64_t>(n_groups);
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < g_count; ++g) {
    const std::size_t k = static_cast<std::size_t>(g);
    partial[k] = zero_grads_like(params);
    accumulate_group(params, traces, grad_outs, group_offsets[k], group_offsets[k + 1], partial[k]);
  }
  MlpGrads total = zero_grads_like(params);
  for (std::size_t g = 0; g < n_groups; ++g) total.add(partial[g]);
  return total;
}

Matrix sqdist_matrix(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("sqdist_matrix: column mismatch");
  Matrix out(a.rows, b.rows);
  const std::int64_t n = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double* x = a.values.data() + k * a.cols;
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* y = b.values.data() + j * b.cols;
      double s = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) {
        const double d = x[c] - y[c];
        s += d * d;
      }
      out(k, j) = s;
    }
  }
  return out;
}

void assign_clusters(const Matrix& data, const Matrix& centroids,
                     std::vector<std::size_t>& labels, std::vector<double>& dists) {
  if (data.cols != centroids.cols) throw std::invalid_argument("assign_clusters: column mismatch");
  labels.assign(data.rows, 0);
  dists.assign(data.rows, 0.0);
  const std::int64_t n = static_cast<std::int64_t>(data.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    assign_point(data, centroids, static_cast<std::size_t>(i), labels, dists);
  }
}

Matrix covariance(const Matrix& data, const std::vector<double>& mean) {
  if (data.rows < 2) throw std::invalid_argument("covariance: need at least 2 rows");
  if (mean.size() != data.cols) throw std::invalid_argument("covariance: mean length mismatch");
  const std::size_t d = data.cols;
  Matrix cov(d, d);
  const std::int64_t dd = static_cast<std::int64_t>(d);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < dd; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    for (std::size_t j = k; j < d; ++j) {
      const double s = covariance_entry(data, mean, k, j);
      cov(k, j) = s;
      cov(j, k) = s;
    }
  }
  return cov;
}

namespace serial {

Matrix embed_batch(const MlpParams& params, const Matrix& inputs) {
  check_embed_inputs(params, inputs);
  Matrix out(inputs.rows, params.output_dim());
  for (std::size_t i = 0; i < inputs.rows; ++i) {
    const std::vector<double> e = forward(params, inputs.row(i));
    std::copy(e.begin(), e.end(), out.row(i).begin());
  }
  return out;
}

Matrix embed_batch_traced(const MlpParams& params, const Matrix& inputs,
                          std::vector<ForwardTrace>& traces) {
  check_embed_inputs(params, inputs);
  Matrix out(inputs.rows, params.output_dim());
  traces.assign(inputs.rows, {});
  for (std::size_t i = 0; i < inputs.rows; ++i) {
    const std::vector<double> e = forward(params, inputs.row(i), &traces[i]);
    std::copy(e.begin(), e.end(), out.row(i).begin());
  }
  return out;
}

MlpGrads backward_grouped(const MlpParams& params, const std::vector<ForwardTrace>& traces,
                          const Matrix& grad_outs, const std::vector<std::size_t>& group_offsets) {
  check_grouped_inputs(traces, grad_outs, group_offsets);
  const std::size_t n_groups = group_offsets.size() - 1;
  MlpGrads total = zero_grads_like(params);
  for (std::size_t g = 0; g < n_groups; ++g) {
    MlpGrads part = zero_grads_like(params);
    accumulate_group(params, traces, grad_outs, group_offsets[g], group_offsets[g + 1], part);
    total.add(part);
  }
  return total;
}

Matrix sqdist_matrix(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("sqdist_matrix: column mismatch");
  Matrix out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* x = a.values.data() + i * a.cols;
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* y = b.values.data() + j * b.cols;
      double s = 0.0;
      for (std::size_t c = 0; c < a.cols; ++c) {
        const double d = x[c] - y[c];
        s += d * d;
      }
      out(i, j) = s;
    }
  }
  return out;
}

void assign_clusters(const Matrix& data, const Matrix& centroids,
                     std::vector<std::size_t>& labels, std::vector<double>& dists) {
  if (data.cols != centroids.cols) throw std::invalid_argument("assign_clusters: column mismatch");
  labels.assign(data.rows, 0);
  dists.assign(data.rows, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    assign_point(data, centroids, i, labels, dists);
  }
}

Matrix covariance(const Matrix& data, const std::vector<double>& mean) {
  if (data.rows < 2) throw std::invalid_argument("covariance: need at least 2 rows");
  if (mean.size() != data.cols) throw std::invalid_argument("covariance: mean length mismatch");
  const std::size_t d = data.cols;
  Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double s = covariance_entry(data, mean, i, j);
      cov(i, j) = s;
      cov(j, i) = s;
    }
  }
  return cov;
}

}  // namespace serial

}  // namespace focusrank::kernels
