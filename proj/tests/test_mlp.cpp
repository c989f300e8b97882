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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "focusrank/mlp.hpp"
#include "focusrank/rng.hpp"
#include "test_util.hpp"

using namespace focusrank;

namespace {

// Straightforward re-implementation of the forward pass, kept deliberately
// naive and separate from the library path.
std::vector<double> naive_forward(const MlpParams& p, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    std::vector<double> z(p.layer_dims[l + 1], 0.0);
    for (std::size_t r = 0; r < z.size(); ++r) {
      z[r] = p.biases[l][r];
      for (std::size_t c = 0; c < a.size(); ++c) z[r] += p.weights[l](r, c) * a[c];
      if (l + 1 < p.weights.size() && z[r] < 0.0) z[r] = 0.0;
    }
    a = z;
  }
  return a;
}

double min_abs_hidden_pre(const ForwardTrace& t) {
  double m = 1e300;
  for (std::size_t l = 0; l + 1 < t.pre.size(); ++l) {
    for (double z : t.pre[l]) m = std::fmin(m, std::fabs(z));
  }
  return m;
}

}  // namespace

TEST_CASE("init_params is deterministic and shapes follow layer_dims") {
  const MlpParams a = init_params({4, 8, 2}, 42);
  const MlpParams b = init_params({4, 8, 2}, 42);
  CHECK(a.weights[0].rows == 8);
  CHECK(a.weights[0].cols == 4);
  CHECK(a.weights[1].rows == 2);
  CHECK(a.weights[1].cols == 8);
  CHECK(a.weights[0].values == b.weights[0].values);
  CHECK(a.weights[1].values == b.weights[1].values);
  for (double v : a.biases[0]) CHECK(v == 0.0);

  CHECK_THROWS_AS(init_params({4}, 0), std::invalid_argument);
  CHECK_THROWS_AS(init_params({4, 0, 2}, 0), std::invalid_argument);
}

TEST_CASE("init_params uses He scaling") {
  const MlpParams p = init_params({256, 256, 4}, 7);
  double sum = 0.0, sum_sq = 0.0;
  for (double v : p.weights[0].values) {
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(p.weights[0].values.size());
  const double var = sum_sq / n - (sum / n) * (sum / n);
  const double expected = 2.0 / 256.0;
  CHECK(var > expected * 0.8);
  CHECK(var < expected * 1.2);
}

TEST_CASE("forward: zero parameters give a zero embedding") {
  MlpParams p = init_params({3, 4, 2}, 1);
  for (auto& w : p.weights) std::fill(w.values.begin(), w.values.end(), 0.0);
  const std::vector<double> x{1.0, -2.0, 3.0};
  for (double v : forward(p, x)) CHECK(v == 0.0);
}

TEST_CASE("forward: a single linear layer computes Wx + b exactly") {
  MlpParams p = init_params({2, 2}, 3);
  p.weights[0](0, 0) = 1.0;
  p.weights[0](0, 1) = 2.0;
  p.weights[0](1, 0) = -3.0;
  p.weights[0](1, 1) = 0.5;
  p.biases[0] = {0.25, -1.0};
  const std::vector<double> x{2.0, -1.0};
  const auto y = forward(p, x);
  CHECK(y[0] == 0.25 + (1.0 * 2.0 + 2.0 * -1.0));
  CHECK(y[1] == -1.0 + (-3.0 * 2.0 + 0.5 * -1.0));
}

TEST_CASE("forward matches a naive re-implementation") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const MlpParams p = init_params({5, 7, 6, 3}, rng.next_u64());
    std::vector<double> x(5);
    for (double& v : x) v = rng.gaussian();
    const auto got = forward(p, x);
    const auto expect = naive_forward(p, x);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::fabs(got[i] - expect[i]) < 1e-12);
    }
  }
}

TEST_CASE("forward rejects bad input") {
  const MlpParams p = init_params({3, 2}, 1);
  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0, std::nan(""), 0.0}), std::invalid_argument);
}

TEST_CASE("backward: zero upstream gradient gives zero parameter gradients") {
  const MlpParams p = init_params({3, 4, 2}, 5);
  ForwardTrace trace;
  forward(p, std::vector<double>{0.5, -0.5, 1.0}, &trace);
  MlpGrads g = zero_grads_like(p);
  backward(p, trace, std::vector<double>{0.0, 0.0}, g);
  for (const auto& w : g.d_weights) {
    for (double v : w.values) CHECK(v == 0.0);
  }
}

TEST_CASE("backward: single linear layer has the closed-form gradient") {
  const MlpParams p = init_params({3, 2}, 6);
  const std::vector<double> x{0.7, -1.2, 2.0};
  ForwardTrace trace;
  forward(p, x, &trace);
  MlpGrads g = zero_grads_like(p);
  const std::vector<double> go{2.0, -0.5};
  backward(p, trace, go, g);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(g.d_biases[0][r] == go[r]);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(g.d_weights[0](r, c) == go[r] * x[c]);
    }
  }
}

TEST_CASE("backward matches finite differences across 20 accepted random seeds") {
  SplitMix64 rng(45);
  int accepted = 0;
  int attempts = 0;
  const double eps = 1e-6;
  while (accepted < 20 && attempts < 400) {
    ++attempts;
    MlpParams p = init_params({4, 6, 3}, rng.next_u64());
    std::vector<double> x(4), go(3);
    for (double& v : x) v = rng.gaussian();
    for (double& v : go) v = rng.gaussian();

    ForwardTrace trace;
    forward(p, x, &trace);
    if (min_abs_hidden_pre(trace) < 1e-2) continue;  // too close to a ReLU kink
    ++accepted;

    MlpGrads analytic = zero_grads_like(p);
    backward(p, trace, go, analytic);

    auto objective = [&] {
      const auto y = forward(p, x);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += go[i] * y[i];
      return s;
    };
    double worst = 0.0;
    double scale = 1e-8;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      for (std::size_t i = 0; i < p.weights[l].values.size(); ++i) {
        double& theta = p.weights[l].values[i];
        const double saved = theta;
        theta = saved + eps;
        const double lp = objective();
        theta = saved - eps;
        const double lm = objective();
        theta = saved;
        const double fd = (lp - lm) / (2.0 * eps);
        worst = std::fmax(worst, std::fabs(fd - analytic.d_weights[l].values[i]));
        scale = std::fmax(scale, std::fabs(analytic.d_weights[l].values[i]));
      }
      for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
        double& theta = p.biases[l][i];
        const double saved = theta;
        theta = saved + eps;
        const double lp = objective();
        theta = saved - eps;
        const double lm = objective();
        theta = saved;
        const double fd = (lp - lm) / (2.0 * eps);
        worst = std::fmax(worst, std::fabs(fd - analytic.d_biases[l][i]));
        scale = std::fmax(scale, std::fabs(analytic.d_biases[l][i]));
      }
    }
    CHECK(worst / scale < 1e-5);
  }
  CHECK(accepted == 20);
}

TEST_CASE("distance_sq examples and symmetry") {
  const std::vector<double> a{0.0, 0.0};
  const std::vector<double> b{3.0, 4.0};
  CHECK(distance_sq(a, a) == 0.0);
  CHECK(distance_sq(a, b) == 25.0);
  CHECK(distance_sq(b, a) == 25.0);

  SplitMix64 rng(46);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(8), y(8);
    for (double& v : x) v = rng.gaussian();
    for (double& v : y) v = rng.gaussian();
    double naive = 0.0;
    for (std::size_t i = 0; i < 8; ++i) naive += (x[i] - y[i]) * (x[i] - y[i]);
    CHECK(std::fabs(distance_sq(x, y) - naive) < 1e-12);
    CHECK(distance_sq(x, y) == distance_sq(y, x));
  }
  CHECK_THROWS_AS(distance_sq(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("l2_normalize produces unit vectors and ignores zero input") {
  std::vector<double> v{3.0, 4.0};
  l2_normalize(v);
  CHECK(std::fabs(v[0] - 0.6) < 1e-15);
  CHECK(std::fabs(v[1] - 0.8) < 1e-15);
  std::vector<double> z{0.0, 0.0};
  l2_normalize(z);
  CHECK(z[0] == 0.0);
}

TEST_CASE("model save/load round trip is exact") {
  const std::filesystem::path path = std::filesystem::temp_directory_path() / "fr_model_test.txt";
  const MlpParams p = init_params({5, 9, 4}, 77);
  save_model(p, path.string());
  const MlpParams q = load_model(path.string());
  CHECK(p.layer_dims == q.layer_dims);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    CHECK(p.weights[l].values == q.weights[l].values);
    CHECK(p.biases[l] == q.biases[l]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("model loader rejects malformed files") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path();
  SUBCASE("bad header") {
    const auto path = dir / "fr_model_bad1.txt";
    std::ofstream(path.string()) << "not-a-model\n";
    CHECK_THROWS_AS(load_model(path.string()), std::invalid_argument);
    std::filesystem::remove(path);
  }
  SUBCASE("truncated weights") {
    const auto path = dir / "fr_model_bad2.txt";
    std::ofstream(path.string()) << "focusrank-model v1\n2 2\nW 2 2\n1.0 2.0\n";
    CHECK_THROWS_AS(load_model(path.string()), std::invalid_argument);
    std::filesystem::remove(path);
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_model((dir / "fr_model_does_not_exist.txt").string()));
  }
}
