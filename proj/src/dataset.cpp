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
#include "focusrank/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "focusrank/errors.hpp"

namespace focusrank {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_config(const SyntheticConfig& cfg) {
  if (cfg.n_classes < 1) throw std::invalid_argument("generate_synthetic: n_classes must be >= 1");
  if (cfg.d_in < 1) throw std::invalid_argument("generate_synthetic: d_in must be >= 1");
  if (cfg.instances_min < 2) throw std::invalid_argument("generate_synthetic: instances_min must be >= 2");
  if (cfg.instances_max < cfg.instances_min) {
    throw std::invalid_argument("generate_synthetic: instances_max < instances_min");
  }
  if (cfg.gain_max < cfg.gain_min || cfg.bias_max < cfg.bias_min) {
    throw std::invalid_argument("generate_synthetic: ranges must be well-ordered");
  }
  if (cfg.rotation_max_angle < 0.0 || cfg.wrinkle_amplitude < 0.0 || cfg.noise_sigma < 0.0) {
    throw std::invalid_argument("generate_synthetic: magnitudes must be >= 0");
  }
}

// Smooth low-frequency perturbation: three random sinusoids over the
// coordinate index, clamped to [-amplitude, amplitude].
std::vector<double> sample_wrinkle(std::size_t dim, double amplitude, SplitMix64& rng) {
  double amp[3], freq[3], phase[3];
  for (int s = 0; s < 3; ++s) {
    amp[s] = rng.uniform(-amplitude / 3.0, amplitude / 3.0);
    freq[s] = rng.uniform(0.5, 3.0);
    phase[s] = rng.uniform(0.0, kTwoPi);
  }
  std::vector<double> w(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double v = 0.0;
    for (int s = 0; s < 3; ++s) {
      v += amp[s] * std::sin(kTwoPi * freq[s] * static_cast<double>(i) / static_cast<double>(dim) +
                             phase[s]);
    }
    w[i] = std::clamp(v, -amplitude, amplitude);
  }
  return w;
}

}  // namespace

std::vector<PlaneRotation> sample_rotation(std::size_t dim, std::size_t planes, double max_angle,
                                           SplitMix64& rng) {
  std::vector<PlaneRotation> rot(planes);
  for (auto& r : rot) {
    if (dim >= 2) {
      r.i = static_cast<std::size_t>(rng.uniform_index(dim));
      r.j = static_cast<std::size_t>(rng.uniform_index(dim - 1));
      if (r.j >= r.i) ++r.j;
    }
    r.angle = rng.uniform(-max_angle, max_angle);
  }
  return rot;
}

void apply_rotation(const std::vector<PlaneRotation>& rot, std::span<double> v) {
  for (const auto& r : rot) {
    if (r.i == r.j) continue;  // dim < 2 fallback
    const double c = std::cos(r.angle);
    const double s = std::sin(r.angle);
    const double vi = v[r.i];
    const double vj = v[r.j];
    v[r.i] = c * vi - s * vj;
    v[r.j] = s * vi + c * vj;
  }
}

LabeledDataset generate_synthetic(const SyntheticConfig& cfg) {
  check_config(cfg);
  SplitMix64 rng(cfg.seed);
  const std::size_t d = cfg.d_in;

  std::vector<double> prototype(d);
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;

  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    for (double& x : prototype) x = rng.gaussian();
    const std::size_t count =
        cfg.instances_min +
        static_cast<std::size_t>(rng.uniform_index(cfg.instances_max - cfg.instances_min + 1));
    for (std::size_t inst = 0; inst < count; ++inst) {
      const double gain = rng.uniform(cfg.gain_min, cfg.gain_max);
      const double bias = rng.uniform(cfg.bias_min, cfg.bias_max);
      const auto rot = sample_rotation(d, cfg.rotation_planes, cfg.rotation_max_angle, rng);
      const auto wrinkle = sample_wrinkle(d, cfg.wrinkle_amplitude, rng);

      std::vector<double> v = prototype;
      apply_rotation(rot, v);
      for (std::size_t i = 0; i < d; ++i) {
        v[i] = gain * v[i] + bias + wrinkle[i] * prototype[i] + cfg.noise_sigma * rng.gaussian();
      }
      rows.push_back(std::move(v));
      labels.push_back(c);
    }
  }

  LabeledDataset ds;
  ds.num_classes = cfg.n_classes;
  ds.labels = std::move(labels);
  ds.features = Matrix(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), ds.features.row(i).begin());
  }
  return ds;
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& dataset,
                                                           SplitMix64& rng) {
  const std::size_t k = dataset.num_classes;
  if (k < 2) throw std::invalid_argument("split_train_test: need at least 2 classes");

  std::vector<std::size_t> class_order(k);
  std::iota(class_order.begin(), class_order.end(), 0);
  for (std::size_t i = k; i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
    std::swap(class_order[i], class_order[j]);
  }

  const std::size_t n_train_classes = k / 2;
  // side 0 = train, side 1 = test; dense new label per original class
  std::vector<int> side(k, 1);
  std::vector<std::size_t> new_label(k, 0);
  for (std::size_t i = 0; i < n_train_classes; ++i) side[class_order[i]] = 0;
  std::size_t next_train = 0, next_test = 0;
  for (std::size_t c = 0; c < k; ++c) {
    new_label[c] = side[c] == 0 ? next_train++ : next_test++;
  }

  LabeledDataset train, test;
  train.num_classes = n_train_classes;
  test.num_classes = k - n_train_classes;
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (side[dataset.labels[i]] == 0 ? train_rows : test_rows).push_back(i);
  }
  auto take = [&](const std::vector<std::size_t>& idx, LabeledDataset& out) {
    out.features = Matrix(idx.size(), dataset.dim());
    out.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::copy(dataset.features.row(idx[i]).begin(), dataset.features.row(idx[i]).end(),
                out.features.row(i).begin());
      out.labels[i] = new_label[dataset.labels[idx[i]]];
    }
  };
  take(train_rows, train);
  take(test_rows, test);
  return {std::move(train), std::move(test)};
}

void save_dataset(const LabeledDataset& dataset, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("save_dataset: cannot open for writing: " + path);
  std::fprintf(f, "focusrank-dataset v1\n");
  std::fprintf(f, "%zu %zu %zu\n", dataset.size(), dataset.dim(), dataset.num_classes);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    std::fprintf(f, "%zu", dataset.labels[i]);
    for (double v : dataset.features.row(i)) std::fprintf(f, " %.17g", v);
    std::fprintf(f, "\n");
  }
  if (std::fclose(f) != 0) throw IoError("save_dataset: write failed: " + path);
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_dataset: cannot open: " + path);

  std::string line;
  if (!std::getline(in, line) || line != "focusrank-dataset v1") {
    throw std::invalid_argument("load_dataset: bad header (line 1) in " + path);
  }
  std::size_t n = 0, d = 0, k = 0;
  if (!std::getline(in, line)) throw std::invalid_argument("load_dataset: missing size line (line 2)");
  {
    std::istringstream sizes(line);
    if (!(sizes >> n >> d >> k) || n == 0 || d == 0 || k == 0) {
      throw std::invalid_argument("load_dataset: bad size line (line 2)");
    }
  }

  LabeledDataset ds;
  ds.num_classes = k;
  ds.features = Matrix(n, d);
  ds.labels.resize(n);
  std::vector<bool> seen(k, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("load_dataset: truncated at line " + std::to_string(i + 3));
    }
    std::istringstream row(line);
    if (!(row >> ds.labels[i]) || ds.labels[i] >= k) {
      throw std::invalid_argument("load_dataset: bad label at line " + std::to_string(i + 3));
    }
    seen[ds.labels[i]] = true;
    for (std::size_t j = 0; j < d; ++j) {
      double v;
      if (!(row >> v)) {
        throw std::invalid_argument("load_dataset: short row at line " + std::to_string(i + 3));
      }
      if (!std::isfinite(v)) {
        throw std::invalid_argument("load_dataset: non-finite value at line " + std::to_string(i + 3));
      }
      ds.features(i, j) = v;
    }
    double extra;
    if (row >> extra) {
      throw std::invalid_argument("load_dataset: long row at line " + std::to_string(i + 3));
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (!seen[c]) {
      throw std::invalid_argument("load_dataset: class " + std::to_string(c) + " has no samples");
    }
  }
  return ds;
}

}  // namespace focusrank
