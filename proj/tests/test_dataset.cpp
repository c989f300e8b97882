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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "focusrank/dataset.hpp"
#include "focusrank/mlp.hpp"

using namespace focusrank;

TEST_CASE("zero variation reproduces the class prototype exactly") {
  SyntheticConfig cfg;
  cfg.n_classes = 3;
  cfg.d_in = 6;
  cfg.gain_min = cfg.gain_max = 1.0;
  cfg.bias_min = cfg.bias_max = 0.0;
  cfg.rotation_max_angle = 0.0;
  cfg.wrinkle_amplitude = 0.0;
  cfg.noise_sigma = 0.0;
  cfg.seed = 4;
  const LabeledDataset ds = generate_synthetic(cfg);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == c) members.push_back(i);
    }
    REQUIRE(members.size() >= 2);
    for (std::size_t m : members) {
      for (std::size_t j = 0; j < ds.dim(); ++j) {
        CHECK(ds.features(m, j) == ds.features(members[0], j));
      }
    }
  }
}

TEST_CASE("per-class instance counts stay within [instances_min, instances_max]") {
  SyntheticConfig cfg;
  cfg.n_classes = 40;
  cfg.seed = 5;
  const LabeledDataset ds = generate_synthetic(cfg);
  std::vector<std::size_t> counts(cfg.n_classes, 0);
  for (std::size_t l : ds.labels) counts[l] += 1;
  for (std::size_t c : counts) {
    CHECK(c >= 5);
    CHECK(c <= 10);
  }
}

TEST_CASE("moderate variation keeps classes separated (10 seeds)") {
  // Separation statistic at paper-like moderate magnitudes: mean intra-class
  // spread stays below the mean nearest-prototype distance.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticConfig cfg;
    cfg.n_classes = 15;
    cfg.d_in = 32;
    cfg.gain_min = 0.7;
    cfg.gain_max = 1.3;
    cfg.bias_min = -0.3;
    cfg.bias_max = 0.3;
    cfg.rotation_max_angle = 0.3;
    cfg.wrinkle_amplitude = 0.2;
    cfg.noise_sigma = 0.05;
    cfg.seed = seed;
    const LabeledDataset ds = generate_synthetic(cfg);

    // class means and mean intra distance-to-mean
    std::vector<std::vector<double>> mean(cfg.n_classes, std::vector<double>(ds.dim(), 0.0));
    std::vector<std::size_t> count(cfg.n_classes, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      count[ds.labels[i]] += 1;
      for (std::size_t j = 0; j < ds.dim(); ++j) mean[ds.labels[i]][j] += ds.features(i, j);
    }
    for (std::size_t c = 0; c < cfg.n_classes; ++c) {
      for (double& v : mean[c]) v /= static_cast<double>(count[c]);
    }
    double intra = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      intra += std::sqrt(distance_sq(ds.features.row(i), mean[ds.labels[i]]));
    }
    intra /= static_cast<double>(ds.size());

    double nearest_sum = 0.0;
    for (std::size_t a = 0; a < cfg.n_classes; ++a) {
      double best = 1e300;
      for (std::size_t b = 0; b < cfg.n_classes; ++b) {
        if (a == b) continue;
        best = std::min(best, std::sqrt(distance_sq(mean[a], mean[b])));
      }
      nearest_sum += best;
    }
    const double nearest = nearest_sum / static_cast<double>(cfg.n_classes);
    CHECK(intra < nearest);
  }
}

TEST_CASE("generation is bit-reproducible per seed") {
  SyntheticConfig cfg;
  cfg.n_classes = 6;
  cfg.seed = 11;
  const LabeledDataset a = generate_synthetic(cfg);
  const LabeledDataset b = generate_synthetic(cfg);
  CHECK(a.labels == b.labels);
  CHECK(a.features.values == b.features.values);
}

TEST_CASE("sampled rotations are orthogonal") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = 8;
    const auto rot = sample_rotation(d, 6, 0.7, rng);
    // Build R column by column from basis vectors.
    Matrix r(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> e(d, 0.0);
      e[j] = 1.0;
      apply_rotation(rot, e);
      for (std::size_t i = 0; i < d; ++i) r(i, j) = e[i];
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += r(i, a) * r(i, b);
        CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("split_train_test partitions classes disjointly and conserves samples") {
  SyntheticConfig cfg;
  cfg.n_classes = 9;
  cfg.seed = 13;
  const LabeledDataset ds = generate_synthetic(cfg);

  SplitMix64 rng(14);
  const auto [train, test] = split_train_test(ds, rng);
  CHECK(train.num_classes == 4);
  CHECK(test.num_classes == 5);
  CHECK(train.size() + test.size() == ds.size());

  // multiset equality of feature rows across the union
  auto rows_of = [](const LabeledDataset& d) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < d.size(); ++i) {
      rows.emplace_back(d.features.row(i).begin(), d.features.row(i).end());
    }
    return rows;
  };
  auto combined = rows_of(train);
  const auto test_rows = rows_of(test);
  combined.insert(combined.end(), test_rows.begin(), test_rows.end());
  auto original = rows_of(ds);
  std::sort(combined.begin(), combined.end());
  std::sort(original.begin(), original.end());
  CHECK(combined == original);

  // labels re-densified
  std::set<std::size_t> train_labels(train.labels.begin(), train.labels.end());
  std::set<std::size_t> test_labels(test.labels.begin(), test.labels.end());
  CHECK(train_labels.size() == train.num_classes);
  CHECK(test_labels.size() == test.num_classes);
  CHECK(*train_labels.rbegin() == train.num_classes - 1);
  CHECK(*test_labels.rbegin() == test.num_classes - 1);
}

TEST_CASE("split_train_test with K = 2 gives one class per side") {
  SyntheticConfig cfg;
  cfg.n_classes = 2;
  cfg.seed = 15;
  const LabeledDataset ds = generate_synthetic(cfg);
  SplitMix64 rng(16);
  const auto [train, test] = split_train_test(ds, rng);
  CHECK(train.num_classes == 1);
  CHECK(test.num_classes == 1);

  LabeledDataset one;
  one.num_classes = 1;
  one.features = Matrix(3, 2, 1.0);
  one.labels = {0, 0, 0};
  SplitMix64 rng2(17);
  CHECK_THROWS_AS(split_train_test(one, rng2), std::invalid_argument);
}

TEST_CASE("dataset save/load round trip is exact") {
  SyntheticConfig cfg;
  cfg.n_classes = 4;
  cfg.d_in = 5;
  cfg.seed = 18;
  const LabeledDataset ds = generate_synthetic(cfg);
  const auto path = std::filesystem::temp_directory_path() / "fr_dataset_test.txt";
  save_dataset(ds, path.string());
  const LabeledDataset back = load_dataset(path.string());
  CHECK(back.num_classes == ds.num_classes);
  CHECK(back.labels == ds.labels);
  CHECK(back.features.values == ds.features.values);
  std::filesystem::remove(path);
}

TEST_CASE("dataset loader names the offending line") {
  const auto dir = std::filesystem::temp_directory_path();
  SUBCASE("truncated file") {
    const auto path = dir / "fr_dataset_trunc.txt";
    std::ofstream(path.string()) << "focusrank-dataset v1\n3 2 2\n0 1.0 2.0\n";
    try {
      load_dataset(path.string());
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    std::filesystem::remove(path);
  }
  SUBCASE("non-finite token") {
    const auto path = dir / "fr_dataset_nan.txt";
    std::ofstream(path.string()) << "focusrank-dataset v1\n2 2 2\n0 1.0 nan\n1 0.0 0.0\n";
    CHECK_THROWS_AS(load_dataset(path.string()), std::invalid_argument);
    std::filesystem::remove(path);
  }
  SUBCASE("bad header") {
    const auto path = dir / "fr_dataset_hdr.txt";
    std::ofstream(path.string()) << "wrong\n";
    CHECK_THROWS_AS(load_dataset(path.string()), std::invalid_argument);
    std::filesystem::remove(path);
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_dataset((dir / "fr_dataset_missing.txt").string()));
  }
}

TEST_CASE("generate_synthetic validates its config") {
  SyntheticConfig cfg;
  cfg.instances_min = 1;
  CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.gain_min = 2.0;
  cfg.gain_max = 1.0;
  CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.noise_sigma = -0.1;
  CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
}
