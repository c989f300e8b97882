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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "focusrank/dataset.hpp"
#include "focusrank/matrix.hpp"
#include "focusrank/mlp.hpp"
#include "focusrank/rng.hpp"

namespace focusrank {

// Disjoint query/gallery partition of a test set. Every query's class keeps
// at least one gallery member.
struct RetrievalSplit {
  std::vector<std::size_t> query_indices;
  std::vector<std::size_t> gallery_indices;
};

// Per class, ceil(fraction * n_c) random members become queries (capped so
// one gallery member always remains); single-sample classes go gallery-only
// with a note on stderr. Deterministic per rng state.
RetrievalSplit split_queries(const std::vector<std::size_t>& labels, double query_fraction,
                             SplitMix64& rng);

// Gallery ranking is by ascending squared L2 distance, ties broken by
// ascending gallery position. K larger than the gallery is clamped (noted on
// stderr).
//
// recall_at_k:   mean over queries of |relevant in top k| / |relevant|.
// hit_rate_at_k: mean over queries of 1(top k contains any relevant), the
//                alternative Recall@K convention, reported separately.
// mAP:           mean of non-interpolated average precision over the full
//                ranking.
double recall_at_k(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                   const RetrievalSplit& split, std::size_t k);
double hit_rate_at_k(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                     const RetrievalSplit& split, std::size_t k);
double mean_average_precision(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                              const RetrievalSplit& split);

// Per-query recall@k for every query, in split.query_indices order.
std::vector<double> per_query_recall_at_k(const Matrix& embeddings,
                                          const std::vector<std::size_t>& labels,
                                          const RetrievalSplit& split, std::size_t k);

// NMI with natural logs, normalized by the mean of the two entropies;
// 0 log 0 := 0. Both partitions trivial => 1.
double nmi(const std::vector<std::size_t>& assignments, const std::vector<std::size_t>& labels);

// Pairwise clustering F1 over all unordered pairs; 0 when the denominator
// vanishes.
double pairwise_f1(const std::vector<std::size_t>& assignments,
                   const std::vector<std::size_t>& labels);

struct EvalRow {
  std::string loss;
  std::size_t dim = 0;
  std::string metric;           // recall | hitrate | map | f1 | nmi
  std::optional<std::size_t> k; // set for recall/hitrate only
  double score = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;

  // CSV "loss,dim,metric,k,score"; k empty for map/f1/nmi; score with 6
  // significant digits.
  void write_csv(const std::string& path) const;
  std::string to_csv() const;
  void append(const EvalReport& other);
};

// Full protocol: embeds all samples once, then per dimension fits PCA on the
// query+gallery embeddings, transforms, and reports recall@k and hitrate@k
// for each k, mAP, and pairwise F1 / NMI from k-means (k = number of classes
// present, 10 seeded restarts, best inertia). Dims above the embedding width
// are clamped with a note.
EvalReport evaluate(const MlpParams& model, const LabeledDataset& test, const RetrievalSplit& split,
                    std::vector<std::size_t> dims, const std::vector<std::size_t>& ks,
                    std::uint64_t seed, const std::string& loss_name);

// Appends distractor samples (classes disjoint from the test set by
// construction: their labels are shifted past the test classes) to the
// gallery. Queries are unchanged and distractors are never relevant.
std::pair<LabeledDataset, RetrievalSplit> add_distractors(const LabeledDataset& test,
                                                          const RetrievalSplit& split,
                                                          const LabeledDataset& distractors);

}  // namespace focusrank
