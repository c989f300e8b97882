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

#include <cstddef>
#include <vector>

#include "focusrank/rng.hpp"

namespace focusrank {

// One training unit: a probe sample, a positive match sharing its label, and
// `ratio` pairwise-distinct negatives from other classes.
struct FocusRankingUnit {
  std::size_t probe = 0;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
};

// Positive drawn uniformly from the probe's class (excluding the probe),
// negatives uniformly WITHOUT replacement from all other-class samples.
// Requires the probe's class to hold >= 2 samples and at least `ratio`
// samples of other classes.
FocusRankingUnit make_unit_for_probe(std::size_t probe, const std::vector<std::size_t>& labels,
                                     std::size_t ratio, SplitMix64& rng);

// One unit per eligible probe (classes of size >= 2), in randomly permuted
// order, cycled to probes_per_epoch. Fresh positive/negative draws per unit.
// Single-sample classes are skipped as probes (with a warning on stderr) but
// stay eligible as negatives.
std::vector<FocusRankingUnit> generate_epoch_units(const std::vector<std::size_t>& labels,
                                                   std::size_t ratio,
                                                   std::size_t probes_per_epoch, SplitMix64& rng);

// Probe-eligible sample indices: members of classes with >= 2 samples.
std::vector<std::size_t> eligible_probes(const std::vector<std::size_t>& labels);

}  // namespace focusrank
