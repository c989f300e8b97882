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
#include "focusrank/sampling.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>
#include <unordered_map>

namespace focusrank {

namespace {

std::vector<std::size_t> class_counts(const std::vector<std::size_t>& labels) {
  std::size_t k = 0;
  for (std::size_t l : labels) k = std::max(k, l + 1);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t l : labels) counts[l] += 1;
  return counts;
}

}  // namespace

FocusRankingUnit make_unit_for_probe(std::size_t probe, const std::vector<std::size_t>& labels,
                                     std::size_t ratio, SplitMix64& rng) {
  if (probe >= labels.size()) throw std::invalid_argument("make_unit_for_probe: probe out of range");
  if (ratio < 1) throw std::invalid_argument("make_unit_for_probe: ratio must be >= 1");

  const std::size_t probe_label = labels[probe];
  std::vector<std::size_t> same, other;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i == probe) continue;
    (labels[i] == probe_label ? same : other).push_back(i);
  }
  if (same.empty()) {
    throw std::invalid_argument("make_unit_for_probe: probe class has a single sample");
  }
  if (other.size() < ratio) {
    throw std::invalid_argument("make_unit_for_probe: fewer other-class samples than ratio");
  }

  FocusRankingUnit unit;
  unit.probe = probe;
  unit.positive = same[static_cast<std::size_t>(rng.uniform_index(same.size()))];

  // Partial Fisher-Yates: the first `ratio` slots become the sample.
  for (std::size_t i = 0; i < ratio; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(other.size() - i));
    std::swap(other[i], other[j]);
  }
  unit.negatives.assign(other.begin(), other.begin() + static_cast<std::ptrdiff_t>(ratio));
  return unit;
}

std::vector<std::size_t> eligible_probes(const std::vector<std::size_t>& labels) {
  const auto counts = class_counts(labels);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (counts[labels[i]] >= 2) out.push_back(i);
  }
  return out;
}

std::vector<FocusRankingUnit> generate_epoch_units(const std::vector<std::size_t>& labels,
                                                   std::size_t ratio,
                                                   std::size_t probes_per_epoch, SplitMix64& rng) {
  std::vector<std::size_t> eligible = eligible_probes(labels);
  if (eligible.empty()) throw std::invalid_argument("generate_epoch_units: no eligible probe");
  if (eligible.size() != labels.size()) {
    std::cerr << "focusrank: " << labels.size() - eligible.size()
              << " sample(s) in single-sample classes skipped as probes\n";
  }

  for (std::size_t i = eligible.size(); i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
    std::swap(eligible[i], eligible[j]);
  }

  std::vector<FocusRankingUnit> units;
  units.reserve(probes_per_epoch);
  for (std::size_t t = 0; t < probes_per_epoch; ++t) {
    units.push_back(make_unit_for_probe(eligible[t % eligible.size()], labels, ratio, rng));
  }
  return units;
}

}  // namespace focusrank
