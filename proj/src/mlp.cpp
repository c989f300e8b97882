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
#include "focusrank/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "focusrank/errors.hpp"
#include "focusrank/rng.hpp"

namespace focusrank {

void MlpGrads::scale(double s) {
  for (auto& w : d_weights) {
    for (double& v : w.values) v *= s;
  }
  for (auto& b : d_biases) {
    for (double& v : b) v *= s;
  }
}

void MlpGrads::add(const MlpGrads& other) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    for (std::size_t i = 0; i < d_weights[l].values.size(); ++i) {
      d_weights[l].values[i] += other.d_weights[l].values[i];
    }
    for (std::size_t i = 0; i < d_biases[l].size(); ++i) {
      d_biases[l][i] += other.d_biases[l][i];
    }
  }
}

bool MlpGrads::finite() const {
  for (const auto& w : d_weights) {
    if (!all_finite(w)) return false;
  }
  for (const auto& b : d_biases) {
    if (!all_finite(std::span<const double>(b))) return false;
  }
  return true;
}

MlpParams init_params(const std::vector<std::size_t>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw std::invalid_argument("init_params: need at least 2 layer dims");
  for (std::size_t d : layer_dims) {
    if (d < 1) throw std::invalid_argument("init_params: layer dims must be >= 1");
  }
  MlpParams p;
  p.layer_dims = layer_dims;
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l];
    const std::size_t fan_out = layer_dims[l + 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (double& v : w.values) v = stddev * rng.gaussian();
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(fan_out, 0.0);
  }
  return p;
}

MlpGrads zero_grads_like(const MlpParams& params) {
  MlpGrads g;
  for (const auto& w : params.weights) g.d_weights.emplace_back(w.rows, w.cols);
  for (const auto& b : params.biases) g.d_biases.emplace_back(b.size(), 0.0);
  return g;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> input,
                            ForwardTrace* trace) {
  if (input.size() != params.input_dim()) {
    throw std::invalid_argument("forward: input length does not match layer_dims[0]");
  }
  if (!all_finite(input)) throw std::invalid_argument("forward: non-finite input");

  const std::size_t n_layers = params.num_layers();
  std::vector<double> act(input.begin(), input.end());
  if (trace) {
    trace->pre.assign(n_layers, {});
    trace->act.assign(n_layers + 1, {});
    trace->act[0] = act;
  }

  for (std::size_t l = 0; l < n_layers; ++l) {
    const Matrix& w = params.weights[l];
    const std::vector<double>& b = params.biases[l];
    std::vector<double> z(w.rows);
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double* wr = w.values.data() + r * w.cols;
      double s = b[r];
      for (std::size_t c = 0; c < w.cols; ++c) s += wr[c] * act[c];
      z[r] = s;
    }
    if (trace) trace->pre[l] = z;
    if (l + 1 < n_layers) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    }
    act = std::move(z);
    if (trace) trace->act[l + 1] = act;
  }
  return act;
}

void backward(const MlpParams& params, const ForwardTrace& trace,
              std::span<const double> grad_out, MlpGrads& grads) {
  const std::size_t n_layers = params.num_layers();
  if (trace.pre.size() != n_layers || trace.act.size() != n_layers + 1) {
    throw std::invalid_argument("backward: trace does not match params");
  }
  if (grad_out.size() != params.output_dim()) {
    throw std::invalid_argument("backward: grad_out length does not match output dim");
  }

  std::vector<double> delta(grad_out.begin(), grad_out.end());
  for (std::size_t li = n_layers; li-- > 0;) {
    const Matrix& w = params.weights[li];
    const std::vector<double>& a_in = trace.act[li];
    Matrix& dw = grads.d_weights[li];
    std::vector<double>& db = grads.d_biases[li];
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double d = delta[r];
      db[r] += d;
      double* dwr = dw.values.data() + r * w.cols;
      for (std::size_t c = 0; c < w.cols; ++c) dwr[c] += d * a_in[c];
    }
    if (li > 0) {
      std::vector<double> next(w.cols, 0.0);
      for (std::size_t r = 0; r < w.rows; ++r) {
        const double d = delta[r];
        const double* wr = w.values.data() + r * w.cols;
        for (std::size_t c = 0; c < w.cols; ++c) next[c] += wr[c] * d;
      }
      const std::vector<double>& z = trace.pre[li - 1];
      for (std::size_t c = 0; c < next.size(); ++c) {
        if (z[c] <= 0.0) next[c] = 0.0;  // ReLU subgradient at 0 is 0
      }
      delta = std::move(next);
    }
  }
}

double distance_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance_sq: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void l2_normalize(std::span<double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (s == 0.0) return;
  const double inv = 1.0 / std::sqrt(s);
  for (double& x : v) x *= inv;
}

namespace {

void write_float_row(std::FILE* f, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    std::fprintf(f, i + 1 < row.size() ? "%.17g " : "%.17g", row[i]);
  }
  std::fprintf(f, "\n");
}

}  // namespace

void save_model(const MlpParams& params, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("save_model: cannot open for writing: " + path);
  std::fprintf(f, "focusrank-model v1\n");
  for (std::size_t i = 0; i < params.layer_dims.size(); ++i) {
    std::fprintf(f, i + 1 < params.layer_dims.size() ? "%zu " : "%zu", params.layer_dims[i]);
  }
  std::fprintf(f, "\n");
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    const Matrix& w = params.weights[l];
    std::fprintf(f, "W %zu %zu\n", w.rows, w.cols);
    for (std::size_t r = 0; r < w.rows; ++r) write_float_row(f, w.row(r));
    const auto& b = params.biases[l];
    std::fprintf(f, "b %zu\n", b.size());
    write_float_row(f, b);
  }
  if (std::fclose(f) != 0) throw IoError("save_model: write failed: " + path);
}

MlpParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_model: cannot open: " + path);

  std::string line;
  if (!std::getline(in, line) || line != "focusrank-model v1") {
    throw std::invalid_argument("load_model: bad header in " + path);
  }
  if (!std::getline(in, line)) throw std::invalid_argument("load_model: missing layer dims");
  std::istringstream dims_in(line);
  std::vector<std::size_t> dims;
  std::size_t d;
  while (dims_in >> d) dims.push_back(d);
  if (dims.size() < 2) throw std::invalid_argument("load_model: need at least 2 layer dims");

  MlpParams p;
  p.layer_dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::string tag;
    std::size_t r, c;
    if (!(in >> tag >> r >> c) || tag != "W" || r != dims[l + 1] || c != dims[l]) {
      throw std::invalid_argument("load_model: bad weight header for layer " + std::to_string(l));
    }
    Matrix w(r, c);
    for (double& v : w.values) {
      if (!(in >> v)) throw std::invalid_argument("load_model: truncated weights, layer " + std::to_string(l));
      if (!std::isfinite(v)) throw std::invalid_argument("load_model: non-finite weight, layer " + std::to_string(l));
    }
    std::size_t bn;
    if (!(in >> tag >> bn) || tag != "b" || bn != r) {
      throw std::invalid_argument("load_model: bad bias header for layer " + std::to_string(l));
    }
    std::vector<double> b(bn);
    for (double& v : b) {
      if (!(in >> v)) throw std::invalid_argument("load_model: truncated biases, layer " + std::to_string(l));
      if (!std::isfinite(v)) throw std::invalid_argument("load_model: non-finite bias, layer " + std::to_string(l));
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

}  // namespace focusrank
