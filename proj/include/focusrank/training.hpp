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
#include <string>
#include <vector>

#include "focusrank/dataset.hpp"
#include "focusrank/mlp.hpp"
#include "focusrank/rng.hpp"

namespace focusrank {

enum class LossKind { kFocus, kTriplet, kContrastive };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct SgdConfig {
  double learning_rate = 0.00005;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::size_t batch_units = 4;
  std::size_t epochs = 200;
  std::size_t ratio = 32;  // negatives per positive in a unit
  std::uint64_t seed = 1;
  LossKind loss_kind = LossKind::kFocus;
  double margin = 1.0;  // baselines only

  void validate() const;  // throws std::invalid_argument on bad fields
};

// Heavy-ball momentum buffers, shaped like the parameters.
struct SgdState {
  std::vector<Matrix> w_velocity;
  std::vector<std::vector<double>> b_velocity;
};

SgdState zero_state_like(const MlpParams& params);

// v <- momentum * v - lr * (g + weight_decay * w) for weights (decay skipped
// for biases), then w <- w + v. Throws if any gradient is non-finite.
void sgd_step(MlpParams& params, const MlpGrads& grads, SgdState& state, const SgdConfig& cfg);

// One pass over an epoch's units in batches of cfg.batch_units: embed all
// unit members, form loss gradients in embedding space, backpropagate,
// average parameter gradients over the batch, apply one sgd_step per batch.
// Returns the mean per-unit loss of the epoch.
double train_epoch(MlpParams& params, const LabeledDataset& dataset, const SgdConfig& cfg,
                   SgdState& state, SplitMix64& rng);

struct TrainResult {
  MlpParams params;
  std::vector<double> epoch_losses;  // mean unit loss per epoch
};

// Full training run: He-initialized [d_in, 64, 64, 32] network (or
// `hidden_dims` + `embedding_dim` when given), cfg.epochs epochs.
// (dataset, cfg) determine the result bit-for-bit.
TrainResult train(const LabeledDataset& dataset, const SgdConfig& cfg,
                  const std::vector<std::size_t>& hidden_dims = {64, 64},
                  std::size_t embedding_dim = 32);

// Compares analytic parameter gradients of the unit loss against central
// finite differences on n_trials random small networks and units drawn from
// the dataset; returns the worst relative error. Two kinds of trials are
// redrawn: ones where a perturbation of size epsilon could flip a ReLU
// pre-activation sign (finite differences are meaningless across the kink)
// and ones whose unit loss is negligible (the gradients sit at the rounding
// floor, so a relative comparison measures noise). Set corrupt_gradients to
// skew the analytic side (negative control for the check itself).
double grad_check(const LabeledDataset& dataset, const SgdConfig& cfg, std::size_t n_trials,
                  double epsilon, bool corrupt_gradients = false);

// Line-oriented "key = value" config. Keys are exactly the SgdConfig field
// names; unknown keys are errors. '#' starts a comment.
SgdConfig parse_config_file(const std::string& path);
SgdConfig parse_config_text(const std::string& text, const std::string& origin);

// CSV "epoch,mean_unit_loss", 10 significant digits.
void write_epoch_log(const std::vector<double>& losses, const std::string& path);

}  // namespace focusrank
