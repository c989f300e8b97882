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
#include "focusrank/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "focusrank/errors.hpp"
#include "focusrank/kernels.hpp"
#include "focusrank/losses.hpp"
#include "focusrank/sampling.hpp"

namespace focusrank {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kFocus: return "focus";
    case LossKind::kTriplet: return "triplet";
    case LossKind::kContrastive: return "contrastive";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "focus") return LossKind::kFocus;
  if (name == "triplet") return LossKind::kTriplet;
  if (name == "contrastive") return LossKind::kContrastive;
  throw std::invalid_argument("unknown loss kind '" + name +
                              "' (expected focus, triplet or contrastive)");
}

void SgdConfig::validate() const {
  // 0 is allowed as a no-op rate so "no drift at lr 0" stays testable.
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("config: learning_rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("config: momentum must be in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("config: weight_decay must be >= 0");
  if (batch_units < 1) throw std::invalid_argument("config: batch_units must be >= 1");
  if (ratio < 1) throw std::invalid_argument("config: ratio must be >= 1");
  if (!(margin > 0.0)) throw std::invalid_argument("config: margin must be > 0");
}

SgdState zero_state_like(const MlpParams& params) {
  SgdState s;
  for (const auto& w : params.weights) s.w_velocity.emplace_back(w.rows, w.cols);
  for (const auto& b : params.biases) s.b_velocity.emplace_back(b.size(), 0.0);
  return s;
}

void sgd_step(MlpParams& params, const MlpGrads& grads, SgdState& state, const SgdConfig& cfg) {
  if (grads.d_weights.size() != params.weights.size()) {
    throw std::invalid_argument("sgd_step: gradient shape mismatch");
  }
  if (!grads.finite()) {
    throw std::runtime_error("sgd_step: non-finite gradient, aborting the step");
  }
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    auto& w = params.weights[l].values;
    auto& v = state.w_velocity[l].values;
    const auto& g = grads.d_weights[l].values;
    if (g.size() != w.size()) throw std::invalid_argument("sgd_step: gradient shape mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = cfg.momentum * v[i] - cfg.learning_rate * (g[i] + cfg.weight_decay * w[i]);
      w[i] += v[i];
    }
    auto& b = params.biases[l];
    auto& vb = state.b_velocity[l];
    const auto& gb = grads.d_biases[l];
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = cfg.momentum * vb[i] - cfg.learning_rate * gb[i];  // no decay on biases
      b[i] += vb[i];
    }
  }
}

namespace {

struct BatchLayout {
  Matrix inputs;                           // member feature rows
  std::vector<std::size_t> group_offsets;  // one group per unit
};

BatchLayout layout_batch(const LabeledDataset& dataset,
                         std::span<const FocusRankingUnit> batch) {
  std::size_t n_members = 0;
  for (const auto& u : batch) n_members += 2 + u.negatives.size();

  BatchLayout out;
  out.inputs = Matrix(n_members, dataset.dim());
  out.group_offsets.push_back(0);
  std::size_t row = 0;
  auto put = [&](std::size_t sample) {
    std::copy(dataset.features.row(sample).begin(), dataset.features.row(sample).end(),
              out.inputs.row(row).begin());
    ++row;
  };
  for (const auto& u : batch) {
    put(u.probe);
    put(u.positive);
    for (std::size_t n : u.negatives) put(n);
    out.group_offsets.push_back(row);
  }
  return out;
}

UnitEmbeddings unit_embeddings_from_rows(const Matrix& emb, std::size_t base,
                                         std::size_t n_negatives) {
  UnitEmbeddings u;
  u.probe.assign(emb.row(base).begin(), emb.row(base).end());
  u.positive.assign(emb.row(base + 1).begin(), emb.row(base + 1).end());
  u.negatives.resize(n_negatives);
  for (std::size_t j = 0; j < n_negatives; ++j) {
    u.negatives[j].assign(emb.row(base + 2 + j).begin(), emb.row(base + 2 + j).end());
  }
  return u;
}

// Loss of one unit plus its gradients with respect to each member embedding,
// written into the matching rows of grad_outs.
double unit_loss_and_embedding_grads(const UnitEmbeddings& u, LossKind kind, double margin,
                                     std::size_t base, Matrix& grad_outs) {
  const std::size_t d = u.probe.size();
  const std::size_t m = u.negatives.size();
  auto add_row = [&](std::size_t row, const std::vector<double>& g) {
    double* dst = grad_outs.values.data() + row * d;
    for (std::size_t i = 0; i < d; ++i) dst[i] += g[i];
  };

  switch (kind) {
    case LossKind::kFocus: {
      const FocusUnitResult res = focus_unit_grads(u);
      add_row(base, res.grads.d_probe);
      add_row(base + 1, res.grads.d_positive);
      for (std::size_t j = 0; j < m; ++j) add_row(base + 2 + j, res.grads.d_negatives[j]);
      return res.loss;
    }
    case LossKind::kTriplet: {
      double loss = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const TripletLossResult res =
            triplet_loss_and_grads(u.probe, u.positive, u.negatives[j], margin);
        loss += res.loss;
        add_row(base, res.d_anchor);
        add_row(base + 1, res.d_pos);
        add_row(base + 2 + j, res.d_neg);
      }
      return loss;
    }
    case LossKind::kContrastive: {
      const PairLossResult same = contrastive_loss_and_grads(u.probe, u.positive, true, margin);
      double loss = same.loss;
      add_row(base, same.d_a);
      add_row(base + 1, same.d_b);
      for (std::size_t j = 0; j < m; ++j) {
        const PairLossResult diff =
            contrastive_loss_and_grads(u.probe, u.negatives[j], false, margin);
        loss += diff.loss;
        add_row(base, diff.d_a);
        add_row(base + 2 + j, diff.d_b);
      }
      return loss;
    }
  }
  throw std::logic_error("unreachable loss kind");
}

}  // namespace

double train_epoch(MlpParams& params, const LabeledDataset& dataset, const SgdConfig& cfg,
                   SgdState& state, SplitMix64& rng) {
  cfg.validate();
  const std::vector<std::size_t> eligible = eligible_probes(dataset.labels);
  const std::vector<FocusRankingUnit> units =
      generate_epoch_units(dataset.labels, cfg.ratio, eligible.size(), rng);

  double loss_sum = 0.0;
  for (std::size_t start = 0; start < units.size(); start += cfg.batch_units) {
    const std::size_t count = std::min(cfg.batch_units, units.size() - start);
    const std::span<const FocusRankingUnit> batch(units.data() + start, count);

    BatchLayout layout = layout_batch(dataset, batch);
    std::vector<ForwardTrace> traces;
    const Matrix emb = kernels::embed_batch_traced(params, layout.inputs, traces);

    Matrix grad_outs(emb.rows, emb.cols);
    for (std::size_t b = 0; b < count; ++b) {
      const std::size_t base = layout.group_offsets[b];
      const UnitEmbeddings u =
          unit_embeddings_from_rows(emb, base, batch[b].negatives.size());
      loss_sum += unit_loss_and_embedding_grads(u, cfg.loss_kind, cfg.margin, base, grad_outs);
    }

    MlpGrads grads = kernels::backward_grouped(params, traces, grad_outs, layout.group_offsets);
    grads.scale(1.0 / static_cast<double>(count));
    sgd_step(params, grads, state, cfg);
  }
  return loss_sum / static_cast<double>(units.size());
}

TrainResult train(const LabeledDataset& dataset, const SgdConfig& cfg,
                  const std::vector<std::size_t>& hidden_dims, std::size_t embedding_dim) {
  cfg.validate();
  std::vector<std::size_t> dims;
  dims.push_back(dataset.dim());
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(embedding_dim);

  SplitMix64 master(cfg.seed);
  TrainResult result;
  result.params = init_params(dims, master.next_u64());
  SgdState state = zero_state_like(result.params);
  SplitMix64 sampler = master.fork(1);

  result.epoch_losses.reserve(cfg.epochs);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    result.epoch_losses.push_back(train_epoch(result.params, dataset, cfg, state, sampler));
  }
  return result;
}

namespace {

// Shift any single-parameter perturbation of size eps can induce on a hidden
// pre-activation of a one-hidden-layer network, with slack.
double kink_margin_needed(const ForwardTrace& trace, double eps) {
  double max_in = 1.0;
  for (double v : trace.act[0]) max_in = std::max(max_in, std::fabs(v));
  return 4.0 * eps * (1.0 + max_in);
}

double loss_for_params(const MlpParams& params, const Matrix& member_inputs,
                       std::size_t n_negatives) {
  UnitEmbeddings u;
  u.probe = forward(params, member_inputs.row(0));
  u.positive = forward(params, member_inputs.row(1));
  u.negatives.resize(n_negatives);
  for (std::size_t j = 0; j < n_negatives; ++j) {
    u.negatives[j] = forward(params, member_inputs.row(2 + j));
  }
  return focus_unit_loss(u);
}

}  // namespace

double grad_check(const LabeledDataset& dataset, const SgdConfig& cfg, std::size_t n_trials,
                  double epsilon, bool corrupt_gradients) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("grad_check: epsilon must be in [1e-7, 1e-3]");
  }
  const std::vector<std::size_t> eligible = eligible_probes(dataset.labels);
  if (eligible.empty()) throw std::invalid_argument("grad_check: no eligible probe");

  SplitMix64 rng(cfg.seed);
  const std::size_t ratio = std::min<std::size_t>(cfg.ratio, 8);

  double worst = 0.0;
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    MlpParams params;
    Matrix member_inputs;
    std::size_t n_negatives = 0;
    std::vector<ForwardTrace> traces;
    Matrix emb;

    // Redraw until (a) no hidden pre-activation sits close enough to its
    // ReLU kink for a +-epsilon parameter bump to flip its sign, and (b) the
    // unit loss is non-negligible. A unit whose negatives are already far
    // beyond the positive has gradients at the rounding floor, where a
    // relative comparison measures noise instead of the formulas.
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt >= 200) throw std::runtime_error("grad_check: could not find a usable trial");
      const std::size_t hidden = 4 + static_cast<std::size_t>(rng.uniform_index(5));
      const std::size_t d_emb = 2 + static_cast<std::size_t>(rng.uniform_index(5));
      params = init_params({dataset.dim(), hidden, d_emb}, rng.next_u64());

      const std::size_t probe = eligible[static_cast<std::size_t>(rng.uniform_index(eligible.size()))];
      const FocusRankingUnit unit = make_unit_for_probe(probe, dataset.labels, ratio, rng);
      n_negatives = unit.negatives.size();

      member_inputs = Matrix(2 + n_negatives, dataset.dim());
      auto put = [&](std::size_t row, std::size_t sample) {
        std::copy(dataset.features.row(sample).begin(), dataset.features.row(sample).end(),
                  member_inputs.row(row).begin());
      };
      put(0, unit.probe);
      put(1, unit.positive);
      for (std::size_t j = 0; j < n_negatives; ++j) put(2 + j, unit.negatives[j]);

      emb = kernels::embed_batch_traced(params, member_inputs, traces);
      double min_abs_pre = std::numeric_limits<double>::infinity();
      double margin_needed = 0.0;
      for (const auto& t : traces) {
        for (double z : t.pre[0]) min_abs_pre = std::min(min_abs_pre, std::fabs(z));
        margin_needed = std::max(margin_needed, kink_margin_needed(t, epsilon));
      }
      if (min_abs_pre <= margin_needed) continue;
      if (loss_for_params(params, member_inputs, n_negatives) < 0.01) continue;
      break;
    }

    // Analytic parameter gradients of the unit loss.
    UnitEmbeddings u = unit_embeddings_from_rows(emb, 0, n_negatives);
    Matrix grad_outs(emb.rows, emb.cols);
    unit_loss_and_embedding_grads(u, LossKind::kFocus, cfg.margin, 0, grad_outs);
    const std::vector<std::size_t> offsets = {0, emb.rows};
    MlpGrads analytic = kernels::backward_grouped(params, traces, grad_outs, offsets);
    if (corrupt_gradients) {
      analytic.d_weights[0].values[0] += 1e-2 * (1.0 + std::fabs(analytic.d_weights[0].values[0]));
    }

    // Central finite differences over every parameter.
    MlpGrads fd = zero_grads_like(params);
    auto probe_param = [&](double& theta, double& slot) {
      const double saved = theta;
      theta = saved + epsilon;
      const double lp = loss_for_params(params, member_inputs, n_negatives);
      theta = saved - epsilon;
      const double lm = loss_for_params(params, member_inputs, n_negatives);
      theta = saved;
      slot = (lp - lm) / (2.0 * epsilon);
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      for (std::size_t i = 0; i < params.weights[l].values.size(); ++i) {
        probe_param(params.weights[l].values[i], fd.d_weights[l].values[i]);
      }
      for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
        probe_param(params.biases[l][i], fd.d_biases[l][i]);
      }
    }

    double scale = 1e-8;
    auto scan_scale = [&](const MlpGrads& g) {
      for (const auto& w : g.d_weights) {
        for (double v : w.values) scale = std::max(scale, std::fabs(v));
      }
      for (const auto& b : g.d_biases) {
        for (double v : b) scale = std::max(scale, std::fabs(v));
      }
    };
    scan_scale(analytic);
    scan_scale(fd);
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      for (std::size_t i = 0; i < params.weights[l].values.size(); ++i) {
        worst = std::max(worst,
                         std::fabs(analytic.d_weights[l].values[i] - fd.d_weights[l].values[i]) / scale);
      }
      for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
        worst = std::max(worst, std::fabs(analytic.d_biases[l][i] - fd.d_biases[l][i]) / scale);
      }
    }
  }
  return worst;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double_field(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad value for key '" + key + "'");
  }
  if (pos != value.size()) throw std::invalid_argument("config: bad value for key '" + key + "'");
  return v;
}

std::uint64_t parse_uint_field(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-') {
    throw std::invalid_argument("config: bad value for key '" + key + "'");
  }
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad value for key '" + key + "'");
  }
  if (pos != value.size()) throw std::invalid_argument("config: bad value for key '" + key + "'");
  return v;
}

}  // namespace

SgdConfig parse_config_text(const std::string& text, const std::string& origin) {
  SgdConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: missing '=' at " + origin + ":" + std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "learning_rate") {
      cfg.learning_rate = parse_double_field(key, value);
    } else if (key == "momentum") {
      cfg.momentum = parse_double_field(key, value);
    } else if (key == "weight_decay") {
      cfg.weight_decay = parse_double_field(key, value);
    } else if (key == "batch_units") {
      cfg.batch_units = static_cast<std::size_t>(parse_uint_field(key, value));
    } else if (key == "epochs") {
      cfg.epochs = static_cast<std::size_t>(parse_uint_field(key, value));
    } else if (key == "ratio") {
      cfg.ratio = static_cast<std::size_t>(parse_uint_field(key, value));
    } else if (key == "seed") {
      cfg.seed = parse_uint_field(key, value);
    } else if (key == "loss_kind") {
      cfg.loss_kind = loss_kind_from_string(value);
    } else if (key == "margin") {
      cfg.margin = parse_double_field(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "' at " + origin + ":" +
                                  std::to_string(line_no));
    }
  }
  cfg.validate();
  return cfg;
}

SgdConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void write_epoch_log(const std::vector<double>& losses, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("epoch log: cannot open for writing: " + path);
  std::fprintf(f, "epoch,mean_unit_loss\n");
  for (std::size_t e = 0; e < losses.size(); ++e) {
    std::fprintf(f, "%zu,%.10g\n", e + 1, losses[e]);
  }
  if (std::fclose(f) != 0) throw IoError("epoch log: write failed: " + path);
}

}  // namespace focusrank
