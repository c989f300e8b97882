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

// Times each parallel kernel against its serial reference and verifies the
// two produce identical bytes. Usage: bench_kernels [scale] (default 1).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "focusrank/kernels.hpp"
#include "focusrank/rng.hpp"

using namespace focusrank;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

Matrix random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values) v = rng.gaussian();
  return m;
}

struct Timing {
  double serial_s = 0.0;
  double parallel_s = 0.0;
  bool identical = true;
};

void report(const char* name, const Timing& t) {
  std::printf("%-18s serial %8.1f ms   parallel %8.1f ms   speedup %5.2fx   %s\n", name,
              t.serial_s * 1e3, t.parallel_s * 1e3, t.serial_s / t.parallel_s,
              t.identical ? "bit-identical" : "MISMATCH");
}

template <typename F>
double timed(F&& fn, int reps) {
  const double t0 = now_seconds();
  for (int r = 0; r < reps; ++r) fn();
  return (now_seconds() - t0) / reps;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t scale = 1;
  if (argc > 1) scale = static_cast<std::size_t>(std::strtoull(argv[1], nullptr, 10));
  if (scale < 1) scale = 1;
  const int reps = 3;

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serially\n");
#endif

  SplitMix64 rng(7);
  const MlpParams params = init_params({64, 64, 64, 32}, rng.next_u64());

  {
    const Matrix inputs = random_matrix(2000 * scale, 64, rng);
    Timing t;
    Matrix a, b;
    t.serial_s = timed([&] { a = kernels::serial::embed_batch(params, inputs); }, reps);
    t.parallel_s = timed([&] { b = kernels::embed_batch(params, inputs); }, reps);
    t.identical = a.values == b.values;
    report("embed_batch", t);
  }
  {
    const Matrix inputs = random_matrix(600 * scale, 64, rng);
    Matrix grad_outs = random_matrix(inputs.rows, 32, rng);
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i <= inputs.rows; i += 30) offsets.push_back(i);
    if (offsets.back() != inputs.rows) offsets.push_back(inputs.rows);
    std::vector<ForwardTrace> traces;
    const Matrix emb = kernels::serial::embed_batch_traced(params, inputs, traces);
    (void)emb;
    Timing t;
    MlpGrads a, b;
    t.serial_s =
        timed([&] { a = kernels::serial::backward_grouped(params, traces, grad_outs, offsets); }, reps);
    t.parallel_s =
        timed([&] { b = kernels::backward_grouped(params, traces, grad_outs, offsets); }, reps);
    t.identical = true;
    for (std::size_t l = 0; l < a.d_weights.size(); ++l) {
      t.identical = t.identical && a.d_weights[l].values == b.d_weights[l].values &&
                    a.d_biases[l] == b.d_biases[l];
    }
    report("backward_grouped", t);
  }
  {
    const Matrix q = random_matrix(400 * scale, 32, rng);
    const Matrix g = random_matrix(2000 * scale, 32, rng);
    Timing t;
    Matrix a, b;
    t.serial_s = timed([&] { a = kernels::serial::sqdist_matrix(q, g); }, reps);
    t.parallel_s = timed([&] { b = kernels::sqdist_matrix(q, g); }, reps);
    t.identical = a.values == b.values;
    report("sqdist_matrix", t);
  }
  {
    const Matrix data = random_matrix(4000 * scale, 32, rng);
    const Matrix centroids = random_matrix(60, 32, rng);
    Timing t;
    std::vector<std::size_t> la, lb;
    std::vector<double> da, db;
    t.serial_s = timed([&] { kernels::serial::assign_clusters(data, centroids, la, da); }, reps);
    t.parallel_s = timed([&] { kernels::assign_clusters(data, centroids, lb, db); }, reps);
    t.identical = la == lb && da == db;
    report("assign_clusters", t);
  }
  {
    const Matrix data = random_matrix(3000 * scale, 64, rng);
    std::vector<double> mean(64, 0.0);
    for (std::size_t i = 0; i < data.rows; ++i) {
      for (std::size_t j = 0; j < 64; ++j) mean[j] += data(i, j);
    }
    for (double& m : mean) m /= static_cast<double>(data.rows);
    Timing t;
    Matrix a, b;
    t.serial_s = timed([&] { a = kernels::serial::covariance(data, mean); }, reps);
    t.parallel_s = timed([&] { b = kernels::covariance(data, mean); }, reps);
    t.identical = a.values == b.values;
    report("covariance", t);
  }
  return 0;
}
