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
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "focusrank/losses.hpp"
#include "focusrank/mlp.hpp"
#include "focusrank/rng.hpp"
#include "test_util.hpp"

using namespace focusrank;
using testutil::random_unit;

namespace {

// Central finite differences of the unit loss with respect to a single
// embedding coordinate (coord must point into u).
double fd_unit_loss(UnitEmbeddings& u, double* coord, double eps) {
  const double saved = *coord;
  *coord = saved + eps;
  const double lp = focus_unit_loss(u);
  *coord = saved - eps;
  const double lm = focus_unit_loss(u);
  *coord = saved;
  return (lp - lm) / (2.0 * eps);
}

}  // namespace

TEST_CASE("sigma anchor values") {
  CHECK(sigma(0.0) == 1.0);
  CHECK(std::fabs(sigma(1.0) - 0.58496250072115618) < 1e-12);
  CHECK(sigma(50.0) < 1e-14);
  CHECK(sigma(50.0) > 0.0);
}

TEST_CASE("sigma is strictly decreasing and dominates the 0-1 indicator") {
  double prev = sigma(-10.0);
  for (int i = 1; i <= 20000; ++i) {
    const double t = -10.0 + 1e-3 * i;
    const double s = sigma(t);
    CHECK(s < prev);
    const double indicator = t < 0.0 ? 1.0 : 0.0;
    CHECK(s >= indicator);
    prev = s;
  }
}

TEST_CASE("delta examples and overflow guard") {
  CHECK(delta(3.5, 3.5) == 1.0);
  CHECK(delta(4.0, 3.0) == 0.5);
  CHECK(delta(1.0, 4.0) == 8.0);
  CHECK(std::isfinite(delta(-1e9, 1e9)));
  CHECK(std::isfinite(delta(1e9, -1e9)));
  CHECK(delta(1e9, -1e9) > 0.0);
  // weight delta/(1+delta) stays in [0, 1] at the clamp
  const double big = delta(-1e9, 1e9);
  CHECK(big / (1.0 + big) <= 1.0);
}

TEST_CASE("focus unit loss: coincident members give m * sigma(0)") {
  for (std::size_t m : {1u, 4u, 32u}) {
    UnitEmbeddings u;
    u.probe = {0.3, -0.7};
    u.positive = u.probe;
    u.negatives.assign(m, u.probe);
    CHECK(focus_unit_loss(u) == static_cast<double>(m));
  }
}

TEST_CASE("focus unit loss: single negative at distance gap 1") {
  UnitEmbeddings u;
  u.probe = {0.0};
  u.positive = {1.0};                // D = 1
  u.negatives = {{std::sqrt(2.0)}};  // D = 2
  CHECK(focus_unit_loss(u) == doctest::Approx(0.58496250072115618).epsilon(1e-12));
}

TEST_CASE("focus loss upper-bounds the ranking-disorder count on random units") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const std::size_t m = 1 + rng.uniform_index(12);
    const UnitEmbeddings u = random_unit(d, m, rng);
    CHECK(focus_unit_loss(u) >= static_cast<double>(zero_one_unit_loss(u)));
  }
}

TEST_CASE("zero_one_unit_loss matches a brute-force comparison loop") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const UnitEmbeddings u = random_unit(3, 1 + rng.uniform_index(8), rng);
    std::size_t expected = 0;
    for (const auto& neg : u.negatives) {
      double dn = 0.0, dp = 0.0;
      for (std::size_t i = 0; i < u.probe.size(); ++i) {
        dn += (u.probe[i] - neg[i]) * (u.probe[i] - neg[i]);
        dp += (u.probe[i] - u.positive[i]) * (u.probe[i] - u.positive[i]);
      }
      if (dn < dp) ++expected;
    }
    CHECK(zero_one_unit_loss(u) == expected);
  }
  UnitEmbeddings far;
  far.probe = {0.0};
  far.positive = {0.0};
  far.negatives = {{5.0}, {6.0}, {7.0}};
  CHECK(zero_one_unit_loss(far) == 0);
  UnitEmbeddings near;
  near.probe = {0.0};
  near.positive = {5.0};
  near.negatives = {{0.1}, {0.2}, {0.3}};
  CHECK(zero_one_unit_loss(near) == 3);
}

TEST_CASE("focus gradients: probe gradient vanishes when positive equals the negative") {
  UnitEmbeddings u;
  u.probe = {0.4, -0.2, 0.9};
  u.positive = {-0.1, 0.3, 0.5};
  u.negatives = {u.positive};
  const FocusUnitResult res = focus_unit_grads(u);
  for (double g : res.grads.d_probe) CHECK(g == 0.0);
}

TEST_CASE("focus gradients: loss matches focus_unit_loss bit-for-bit") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const UnitEmbeddings u = random_unit(1 + rng.uniform_index(8), 1 + rng.uniform_index(16), rng);
    CHECK(focus_unit_grads(u).loss == focus_unit_loss(u));
  }
}

TEST_CASE("focus gradients match central finite differences") {
  SplitMix64 rng(14);
  int checked = 0;
  for (std::size_t d : {2u, 8u, 32u}) {
    for (std::size_t m : {1u, 4u, 32u}) {
      for (int rep = 0; rep < 6; ++rep) {
        UnitEmbeddings u = random_unit(d, m, rng);
        const FocusUnitResult res = focus_unit_grads(u);
        const double eps = 1e-5;
        double scale = 1e-8;
        auto scan = [&](const std::vector<double>& g) {
          for (double v : g) scale = std::fmax(scale, std::fabs(v));
        };
        scan(res.grads.d_probe);
        scan(res.grads.d_positive);
        for (const auto& g : res.grads.d_negatives) scan(g);

        double worst = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          worst = std::fmax(worst,
                            std::fabs(fd_unit_loss(u, &u.probe[i], eps) - res.grads.d_probe[i]));
          worst = std::fmax(
              worst, std::fabs(fd_unit_loss(u, &u.positive[i], eps) - res.grads.d_positive[i]));
        }
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t i = 0; i < d; ++i) {
            worst = std::fmax(worst, std::fabs(fd_unit_loss(u, &u.negatives[j][i], eps) -
                                               res.grads.d_negatives[j][i]));
          }
        }
        CHECK(worst / scale < 1e-6);
        ++checked;
      }
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("focus loss and gradients are translation invariant") {
  SplitMix64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    UnitEmbeddings u = random_unit(5, 4, rng);
    const FocusUnitResult base = focus_unit_grads(u);

    std::vector<double> shift(5);
    for (double& s : shift) s = rng.gaussian();
    UnitEmbeddings shifted = u;
    for (std::size_t i = 0; i < 5; ++i) {
      shifted.probe[i] += shift[i];
      shifted.positive[i] += shift[i];
      for (auto& neg : shifted.negatives) neg[i] += shift[i];
    }
    const FocusUnitResult moved = focus_unit_grads(shifted);
    CHECK(std::fabs(moved.loss - base.loss) < 1e-10);
    CHECK(testutil::max_rel_err(moved.grads.d_probe, base.grads.d_probe) < 1e-8);
    CHECK(testutil::max_rel_err(moved.grads.d_positive, base.grads.d_positive) < 1e-8);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(testutil::max_rel_err(moved.grads.d_negatives[j], base.grads.d_negatives[j]) < 1e-8);
    }
  }
}

TEST_CASE("focus gradients sum to zero across the unit") {
  SplitMix64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const UnitEmbeddings u = random_unit(4, 1 + rng.uniform_index(10), rng);
    const FocusUnitResult res = focus_unit_grads(u);
    for (std::size_t i = 0; i < 4; ++i) {
      double total = res.grads.d_probe[i] + res.grads.d_positive[i];
      for (const auto& g : res.grads.d_negatives) total += g[i];
      CHECK(std::fabs(total) < 1e-10);
    }
  }
}

TEST_CASE("pushing a negative away never increases the focus loss") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    UnitEmbeddings u = random_unit(4, 3, rng);
    const double before = focus_unit_loss(u);
    const std::size_t j = rng.uniform_index(3);
    for (std::size_t i = 0; i < 4; ++i) {
      u.negatives[j][i] = u.probe[i] + 1.5 * (u.negatives[j][i] - u.probe[i]);
    }
    CHECK(focus_unit_loss(u) <= before);
  }
}

TEST_CASE("focus operations reject empty negatives") {
  UnitEmbeddings u;
  u.probe = {1.0};
  u.positive = {2.0};
  CHECK_THROWS_AS(focus_unit_loss(u), std::invalid_argument);
  CHECK_THROWS_AS(focus_unit_grads(u), std::invalid_argument);
  CHECK_THROWS_AS(zero_one_unit_loss(u), std::invalid_argument);
}

TEST_CASE("contrastive loss examples") {
  const std::vector<double> z{0.0, 0.0};
  SUBCASE("same label, identical points") {
    const PairLossResult r = contrastive_loss_and_grads(z, z, true, 1.0);
    CHECK(r.loss == 0.0);
    for (double g : r.d_a) CHECK(g == 0.0);
  }
  SUBCASE("different label beyond the margin") {
    const std::vector<double> far{3.0, 4.0};
    const PairLossResult r = contrastive_loss_and_grads(z, far, false, 1.0);
    CHECK(r.loss == 0.0);
    for (double g : r.d_a) CHECK(g == 0.0);
    for (double g : r.d_b) CHECK(g == 0.0);
  }
  SUBCASE("different label inside the margin") {
    const std::vector<double> a{0.0};
    const std::vector<double> b{0.5};
    const PairLossResult r = contrastive_loss_and_grads(a, b, false, 1.0);
    CHECK(r.loss == doctest::Approx(0.125).epsilon(1e-14));
  }
  SUBCASE("length mismatch") {
    const std::vector<double> b{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(contrastive_loss_and_grads(z, b, true, 1.0), std::invalid_argument);
  }
}

TEST_CASE("contrastive gradients match finite differences") {
  SplitMix64 rng(18);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(6);
    std::vector<double> a(d), b(d);
    for (double& v : a) v = 0.4 * rng.gaussian();
    for (double& v : b) v = 0.4 * rng.gaussian();
    const bool same = rng.uniform_index(2) == 0;
    const double margin = 1.0;
    const PairLossResult res = contrastive_loss_and_grads(a, b, same, margin);

    // Skip configurations close to the hinge, where the subgradient is
    // one-sided by convention.
    const double dist = std::sqrt(distance_sq(a, b));
    if (!same && std::fabs(margin - dist) < 1e-3) continue;
    if (!same && dist < 1e-3) continue;

    const double eps = 1e-6;
    for (std::size_t i = 0; i < d; ++i) {
      auto probe = [&](std::vector<double>& vec, std::size_t idx) {
        const double saved = vec[idx];
        vec[idx] = saved + eps;
        const double lp = contrastive_loss_and_grads(a, b, same, margin).loss;
        vec[idx] = saved - eps;
        const double lm = contrastive_loss_and_grads(a, b, same, margin).loss;
        vec[idx] = saved;
        return (lp - lm) / (2.0 * eps);
      };
      CHECK(std::fabs(probe(a, i) - res.d_a[i]) < 1e-6);
      CHECK(std::fabs(probe(b, i) - res.d_b[i]) < 1e-6);
    }
  }
}

TEST_CASE("triplet loss examples") {
  const std::vector<double> a{0.0, 0.0};
  const std::vector<double> p{1.0, 0.0};
  SUBCASE("positive equals negative gives exactly the margin") {
    const TripletLossResult r = triplet_loss_and_grads(a, p, p, 0.7);
    CHECK(r.loss == 0.7);
  }
  SUBCASE("inactive hinge gives zero loss and gradients") {
    const std::vector<double> far{5.0, 5.0};
    const TripletLossResult r = triplet_loss_and_grads(a, p, far, 1.0);
    CHECK(r.loss == 0.0);
    for (double g : r.d_anchor) CHECK(g == 0.0);
    for (double g : r.d_pos) CHECK(g == 0.0);
    for (double g : r.d_neg) CHECK(g == 0.0);
  }
}

TEST_CASE("triplet gradients match finite differences") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(6);
    std::vector<double> a(d), p(d), n(d);
    for (double& v : a) v = 0.4 * rng.gaussian();
    for (double& v : p) v = 0.4 * rng.gaussian();
    for (double& v : n) v = 0.4 * rng.gaussian();
    const double margin = 1.0;
    const double hinge = distance_sq(a, p) - distance_sq(a, n) + margin;
    if (std::fabs(hinge) < 1e-3) continue;  // subgradient convention at the kink

    const TripletLossResult res = triplet_loss_and_grads(a, p, n, margin);
    const double eps = 1e-6;
    auto probe = [&](std::vector<double>& vec, std::size_t idx) {
      const double saved = vec[idx];
      vec[idx] = saved + eps;
      const double lp = triplet_loss_and_grads(a, p, n, margin).loss;
      vec[idx] = saved - eps;
      const double lm = triplet_loss_and_grads(a, p, n, margin).loss;
      vec[idx] = saved;
      return (lp - lm) / (2.0 * eps);
    };
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(std::fabs(probe(a, i) - res.d_anchor[i]) < 1e-6);
      CHECK(std::fabs(probe(p, i) - res.d_pos[i]) < 1e-6);
      CHECK(std::fabs(probe(n, i) - res.d_neg[i]) < 1e-6);
    }
  }
}
