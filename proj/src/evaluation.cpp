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
#include "focusrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "focusrank/errors.hpp"
#include "focusrank/kernels.hpp"
#include "focusrank/kmeans.hpp"
#include "focusrank/pca.hpp"

namespace focusrank {

RetrievalSplit split_queries(const std::vector<std::size_t>& labels, double query_fraction,
                             SplitMix64& rng) {
  if (labels.empty()) throw std::invalid_argument("split_queries: empty test set");
  if (!(query_fraction > 0.0 && query_fraction <= 1.0)) {
    throw std::invalid_argument("split_queries: query_fraction must be in (0, 1]");
  }

  std::size_t k = 0;
  for (std::size_t l : labels) k = std::max(k, l + 1);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  RetrievalSplit split;
  std::size_t gallery_only = 0;
  for (std::size_t c = 0; c < k; ++c) {
    auto& m = members[c];
    if (m.empty()) continue;
    if (m.size() < 2) {
      ++gallery_only;
      split.gallery_indices.push_back(m[0]);
      continue;
    }
    for (std::size_t i = m.size(); i-- > 1;) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
      std::swap(m[i], m[j]);
    }
    const std::size_t want =
        static_cast<std::size_t>(std::ceil(query_fraction * static_cast<double>(m.size())));
    const std::size_t n_queries = std::min(want, m.size() - 1);
    for (std::size_t i = 0; i < m.size(); ++i) {
      (i < n_queries ? split.query_indices : split.gallery_indices).push_back(m[i]);
    }
  }
  if (gallery_only > 0) {
    std::cerr << "focusrank: " << gallery_only << " single-sample class(es) kept gallery-only\n";
  }
  if (split.query_indices.empty()) {
    throw std::invalid_argument("split_queries: no queries produced (all classes too small?)");
  }
  std::sort(split.query_indices.begin(), split.query_indices.end());
  std::sort(split.gallery_indices.begin(), split.gallery_indices.end());
  return split;
}

namespace {

std::size_t clamp_k(std::size_t k, std::size_t gallery_size, const char* what) {
  if (k < 1) throw std::invalid_argument("retrieval: k must be >= 1");
  if (k > gallery_size) {
    std::cerr << "focusrank: " << what << ": k=" << k << " clamped to gallery size "
              << gallery_size << "\n";
    return gallery_size;
  }
  return k;
}

// Gallery positions sorted by (distance to query, gallery position).
std::vector<std::size_t> ranked_gallery(const Matrix& embeddings, const RetrievalSplit& split,
                                        std::size_t query_index) {
  const std::size_t g = split.gallery_indices.size();
  std::vector<double> dist(g);
  const auto q = embeddings.row(query_index);
  for (std::size_t j = 0; j < g; ++j) {
    dist[j] = distance_sq(q, embeddings.row(split.gallery_indices[j]));
  }
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });
  return order;
}

std::size_t relevant_count(const std::vector<std::size_t>& labels, const RetrievalSplit& split,
                           std::size_t query_index) {
  std::size_t r = 0;
  for (std::size_t gi : split.gallery_indices) {
    if (labels[gi] == labels[query_index]) ++r;
  }
  return r;
}

void check_eval_inputs(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                       const RetrievalSplit& split) {
  if (labels.size() != embeddings.rows) {
    throw std::invalid_argument("retrieval: labels/embeddings size mismatch");
  }
  if (split.query_indices.empty() || split.gallery_indices.empty()) {
    throw std::invalid_argument("retrieval: empty split");
  }
}

}  // namespace

std::vector<double> per_query_recall_at_k(const Matrix& embeddings,
                                          const std::vector<std::size_t>& labels,
                                          const RetrievalSplit& split, std::size_t k) {
  check_eval_inputs(embeddings, labels, split);
  const std::size_t kk = clamp_k(k, split.gallery_indices.size(), "recall_at_k");
  std::vector<double> out(split.query_indices.size(), 0.0);
  const std::int64_t nq = static_cast<std::int64_t>(split.query_indices.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t qi = 0; qi < nq; ++qi) {
    const std::size_t q = split.query_indices[static_cast<std::size_t>(qi)];
    const std::size_t relevant = relevant_count(labels, split, q);
    if (relevant == 0) continue;  // excluded by the split invariant
    const auto order = ranked_gallery(embeddings, split, q);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < kk; ++r) {
      if (labels[split.gallery_indices[order[r]]] == labels[q]) ++hits;
    }
    out[static_cast<std::size_t>(qi)] =
        static_cast<double>(hits) / static_cast<double>(relevant);
  }
  return out;
}

double recall_at_k(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                   const RetrievalSplit& split, std::size_t k) {
  const auto per_query = per_query_recall_at_k(embeddings, labels, split, k);
  double sum = 0.0;
  for (double v : per_query) sum += v;
  return sum / static_cast<double>(per_query.size());
}

double hit_rate_at_k(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                     const RetrievalSplit& split, std::size_t k) {
  check_eval_inputs(embeddings, labels, split);
  const std::size_t kk = clamp_k(k, split.gallery_indices.size(), "hit_rate_at_k");
  std::vector<double> hit(split.query_indices.size(), 0.0);
  const std::int64_t nq = static_cast<std::int64_t>(split.query_indices.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t qi = 0; qi < nq; ++qi) {
    const std::size_t q = split.query_indices[static_cast<std::size_t>(qi)];
    const auto order = ranked_gallery(embeddings, split, q);
    for (std::size_t r = 0; r < kk; ++r) {
      if (labels[split.gallery_indices[order[r]]] == labels[q]) {
        hit[static_cast<std::size_t>(qi)] = 1.0;
        break;
      }
    }
  }
  double sum = 0.0;
  for (double v : hit) sum += v;
  return sum / static_cast<double>(hit.size());
}

double mean_average_precision(const Matrix& embeddings, const std::vector<std::size_t>& labels,
                              const RetrievalSplit& split) {
  check_eval_inputs(embeddings, labels, split);
  std::vector<double> ap(split.query_indices.size(), 0.0);
  const std::int64_t nq = static_cast<std::int64_t>(split.query_indices.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t qi = 0; qi < nq; ++qi) {
    const std::size_t q = split.query_indices[static_cast<std::size_t>(qi)];
    const std::size_t relevant = relevant_count(labels, split, q);
    if (relevant == 0) continue;
    const auto order = ranked_gallery(embeddings, split, q);
    std::size_t hits = 0;
    double sum_prec = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (labels[split.gallery_indices[order[r]]] == labels[q]) {
        ++hits;
        sum_prec += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    ap[static_cast<std::size_t>(qi)] = sum_prec / static_cast<double>(relevant);
  }
  double sum = 0.0;
  for (double v : ap) sum += v;
  return sum / static_cast<double>(ap.size());
}

namespace {

// Contingency counts between two labelings, plus marginals.
struct Contingency {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
  std::map<std::size_t, std::size_t> a_counts;
  std::map<std::size_t, std::size_t> b_counts;
  std::size_t n = 0;
};

Contingency contingency(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  Contingency c;
  c.n = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.joint[{a[i], b[i]}] += 1;
    c.a_counts[a[i]] += 1;
    c.b_counts[b[i]] += 1;
  }
  return c;
}

double entropy(const std::map<std::size_t, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, count] : counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double nmi(const std::vector<std::size_t>& assignments, const std::vector<std::size_t>& labels) {
  if (assignments.size() != labels.size()) throw std::invalid_argument("nmi: length mismatch");
  if (assignments.empty()) throw std::invalid_argument("nmi: empty input");

  const Contingency c = contingency(assignments, labels);
  const double n = static_cast<double>(c.n);
  const double ha = entropy(c.a_counts, n);
  const double hb = entropy(c.b_counts, n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both partitions trivial

  double mi = 0.0;
  for (const auto& [cell, count] : c.joint) {
    if (count == 0) continue;
    const double pij = static_cast<double>(count) / n;
    const double pi = static_cast<double>(c.a_counts.at(cell.first)) / n;
    const double qj = static_cast<double>(c.b_counts.at(cell.second)) / n;
    mi += pij * std::log(pij / (pi * qj));
  }
  const double denom = 0.5 * (ha + hb);
  const double value = mi / denom;
  return std::clamp(value, 0.0, 1.0);
}

double pairwise_f1(const std::vector<std::size_t>& assignments,
                   const std::vector<std::size_t>& labels) {
  if (assignments.size() != labels.size()) throw std::invalid_argument("pairwise_f1: length mismatch");
  if (assignments.size() < 2) throw std::invalid_argument("pairwise_f1: need at least 2 points");

  // Pair counts via contingency combinatorics: pairs(x) = x (x - 1) / 2.
  auto pairs = [](std::size_t x) { return static_cast<double>(x) * (x - 1) / 2.0; };
  const Contingency c = contingency(assignments, labels);
  double same_both = 0.0;
  for (const auto& [cell, count] : c.joint) same_both += pairs(count);
  double same_cluster = 0.0;
  for (const auto& [label, count] : c.a_counts) same_cluster += pairs(count);
  double same_label = 0.0;
  for (const auto& [label, count] : c.b_counts) same_label += pairs(count);

  const double tp = same_both;
  const double fp = same_cluster - same_both;
  const double fn = same_label - same_both;
  const double denom = 2.0 * tp + fp + fn;
  if (denom == 0.0) return 0.0;
  return 2.0 * tp / denom;
}

void EvalReport::append(const EvalReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string EvalReport::to_csv() const {
  std::string out = "loss,dim,metric,k,score\n";
  char buf[160];
  for (const auto& r : rows) {
    if (r.k.has_value()) {
      std::snprintf(buf, sizeof(buf), "%s,%zu,%s,%zu,%.6g\n", r.loss.c_str(), r.dim,
                    r.metric.c_str(), *r.k, r.score);
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%zu,%s,,%.6g\n", r.loss.c_str(), r.dim,
                    r.metric.c_str(), r.score);
    }
    out += buf;
  }
  return out;
}

void EvalReport::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("eval report: cannot open for writing: " + path);
  const std::string csv = to_csv();
  if (std::fwrite(csv.data(), 1, csv.size(), f) != csv.size()) {
    std::fclose(f);
    throw IoError("eval report: write failed: " + path);
  }
  if (std::fclose(f) != 0) throw IoError("eval report: write failed: " + path);
}

EvalReport evaluate(const MlpParams& model, const LabeledDataset& test, const RetrievalSplit& split,
                    std::vector<std::size_t> dims, const std::vector<std::size_t>& ks,
                    std::uint64_t seed, const std::string& loss_name) {
  if (test.dim() != model.input_dim()) {
    throw std::invalid_argument("evaluate: dataset dimension does not match model input");
  }
  const std::size_t d_emb = model.output_dim();
  for (auto& d : dims) {
    if (d > d_emb) {
      std::cerr << "focusrank: eval dim " << d << " clamped to embedding width " << d_emb << "\n";
      d = d_emb;
    }
    if (d < 1) throw std::invalid_argument("evaluate: dims must be >= 1");
  }

  const Matrix embeddings = kernels::embed_batch(model, test.features);

  // Number of classes actually present among queries + gallery.
  std::vector<bool> present(test.num_classes, false);
  for (std::size_t i : split.query_indices) present[test.labels[i]] = true;
  for (std::size_t i : split.gallery_indices) present[test.labels[i]] = true;
  std::size_t n_classes = 0;
  for (bool b : present) n_classes += b ? 1 : 0;

  SplitMix64 rng(seed);
  EvalReport report;
  for (std::size_t dim : dims) {
    const PcaModel pca = pca_fit(embeddings, dim);
    const Matrix reduced = pca_transform(pca, embeddings);

    for (std::size_t k : ks) {
      report.rows.push_back(
          {loss_name, dim, "recall", k, recall_at_k(reduced, test.labels, split, k)});
    }
    for (std::size_t k : ks) {
      report.rows.push_back(
          {loss_name, dim, "hitrate", k, hit_rate_at_k(reduced, test.labels, split, k)});
    }
    report.rows.push_back({loss_name, dim, "map", std::nullopt,
                           mean_average_precision(reduced, test.labels, split)});

    KmeansResult best;
    for (int restart = 0; restart < 10; ++restart) {
      KmeansResult r = kmeans(reduced, n_classes, rng.next_u64());
      if (restart == 0 || r.inertia < best.inertia) best = std::move(r);
    }
    report.rows.push_back(
        {loss_name, dim, "f1", std::nullopt, pairwise_f1(best.assignments, test.labels)});
    report.rows.push_back(
        {loss_name, dim, "nmi", std::nullopt, nmi(best.assignments, test.labels)});
  }
  return report;
}

std::pair<LabeledDataset, RetrievalSplit> add_distractors(const LabeledDataset& test,
                                                          const RetrievalSplit& split,
                                                          const LabeledDataset& distractors) {
  if (distractors.size() == 0) return {test, split};
  if (distractors.dim() != test.dim()) {
    throw std::invalid_argument("add_distractors: feature dimension mismatch");
  }

  LabeledDataset combined;
  combined.num_classes = test.num_classes + distractors.num_classes;
  combined.features = Matrix(test.size() + distractors.size(), test.dim());
  combined.labels.resize(test.size() + distractors.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::copy(test.features.row(i).begin(), test.features.row(i).end(),
              combined.features.row(i).begin());
    combined.labels[i] = test.labels[i];
  }
  for (std::size_t i = 0; i < distractors.size(); ++i) {
    std::copy(distractors.features.row(i).begin(), distractors.features.row(i).end(),
              combined.features.row(test.size() + i).begin());
    // Shifting past the test classes keeps label universes disjoint, so a
    // distractor can never count as relevant for any query.
    combined.labels[test.size() + i] = test.num_classes + distractors.labels[i];
  }

  RetrievalSplit extended = split;
  for (std::size_t i = 0; i < distractors.size(); ++i) {
    extended.gallery_indices.push_back(test.size() + i);
  }
  return {std::move(combined), std::move(extended)};
}

}  // namespace focusrank
