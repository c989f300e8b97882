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

// focusrank CLI: reproducible metric-learning experiments on synthetic
// fabric-like data. Subcommands: gen-data, train, eval, gradcheck,
// sweep-ratio, compare. Every command is deterministic given its flags.
// Exit codes: 0 success, 1 check failure, 2 usage/parse error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "focusrank/dataset.hpp"
#include "focusrank/errors.hpp"
#include "focusrank/evaluation.hpp"
#include "focusrank/kernels.hpp"
#include "focusrank/mlp.hpp"
#include "focusrank/training.hpp"

namespace {

using namespace focusrank;

std::vector<std::size_t> parse_count_list(const std::string& csv, const std::string& flag) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const auto comma = csv.find(',', pos);
    const std::string tok = csv.substr(pos, comma == std::string::npos ? csv.size() - pos
                                                                       : comma - pos);
    if (tok.empty()) throw std::invalid_argument(flag + ": empty entry in list '" + csv + "'");
    std::size_t parsed = 0;
    std::size_t used = 0;
    try {
      parsed = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": bad entry '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument(flag + ": bad entry '" + tok + "'");
    out.push_back(parsed);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument(flag + ": empty list");
  return out;
}

struct GenDataArgs {
  SyntheticConfig cfg;
  std::string out;
};

int run_gen_data(const GenDataArgs& args) {
  const LabeledDataset ds = generate_synthetic(args.cfg);
  save_dataset(ds, args.out);
  std::cout << "wrote " << ds.size() << " samples, " << ds.num_classes << " classes, dim "
            << ds.dim() << " -> " << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string config;
  std::string loss;
  std::string out;
  std::string log;
};

int run_train(const TrainArgs& args) {
  SgdConfig cfg = args.config.empty() ? SgdConfig{} : parse_config_file(args.config);
  if (!args.loss.empty()) cfg.loss_kind = loss_kind_from_string(args.loss);
  cfg.validate();

  const LabeledDataset ds = load_dataset(args.data);
  const TrainResult result = train(ds, cfg);
  save_model(result.params, args.out);
  if (!args.log.empty()) write_epoch_log(result.epoch_losses, args.log);
  const double last = result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back();
  std::cout << "trained " << to_string(cfg.loss_kind) << " for " << cfg.epochs
            << " epochs, final mean unit loss " << last << " -> " << args.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string dims = "32,16,8";
  std::string ks = "1,2,4,8,16,32";
  double query_frac = 0.4;
  std::string distractors;
  std::uint64_t seed = 1;
  std::string out;
  std::string label = "model";
};

int run_eval(const EvalArgs& args) {
  const MlpParams model = load_model(args.model);
  LabeledDataset test = load_dataset(args.data);

  SplitMix64 rng(args.seed);
  RetrievalSplit split = split_queries(test.labels, args.query_frac, rng);
  if (!args.distractors.empty()) {
    const LabeledDataset extra = load_dataset(args.distractors);
    auto [combined, extended] = add_distractors(test, split, extra);
    test = std::move(combined);
    split = std::move(extended);
  }

  const EvalReport report =
      evaluate(model, test, split, parse_count_list(args.dims, "--dims"),
               parse_count_list(args.ks, "--ks"), rng.next_u64(), args.label);
  report.write_csv(args.out);
  std::cout << "wrote " << report.rows.size() << " rows -> " << args.out << "\n";
  return 0;
}

struct GradcheckArgs {
  std::size_t trials = 20;
  double eps = 1e-5;
  std::uint64_t seed = 1;
  bool corrupt = false;
};

int run_gradcheck(const GradcheckArgs& args) {
  SyntheticConfig data_cfg;
  data_cfg.n_classes = 8;
  data_cfg.d_in = 8;
  data_cfg.seed = args.seed;
  const LabeledDataset ds = generate_synthetic(data_cfg);

  SgdConfig cfg;
  cfg.seed = args.seed;
  cfg.ratio = 8;
  const double err = grad_check(ds, cfg, args.trials, args.eps, args.corrupt);
  std::printf("gradcheck: max relative error %.3e over %zu trials (eps %.1e)\n", err, args.trials,
              args.eps);
  return err < 1e-5 ? 0 : 1;
}

struct SweepArgs {
  std::string ratios = "1,2,4,8,16,32";
  std::string seeds = "1,2,3";
  std::size_t k = 16;
  std::size_t classes = 120;
  std::size_t dim = 32;
  std::string out;
};

int run_sweep_ratio(const SweepArgs& args) {
  const auto ratios = parse_count_list(args.ratios, "--ratios");
  const auto seeds = parse_count_list(args.seeds, "--seeds");

  std::string csv = "ratio,seed,metric,k,score\n";
  char buf[128];
  for (std::size_t seed : seeds) {
    SyntheticConfig data_cfg;
    data_cfg.n_classes = args.classes;
    data_cfg.d_in = args.dim;
    data_cfg.seed = seed;
    const LabeledDataset full = generate_synthetic(data_cfg);
    SplitMix64 split_rng(seed);
    const auto [train_ds, test_ds] = split_train_test(full, split_rng);
    const RetrievalSplit split = split_queries(test_ds.labels, 0.4, split_rng);

    for (std::size_t ratio : ratios) {
      SgdConfig cfg;
      cfg.seed = seed;
      cfg.ratio = ratio;
      const TrainResult result = train(train_ds, cfg);
      const Matrix emb = kernels::embed_batch(result.params, test_ds.features);
      const double score = recall_at_k(emb, test_ds.labels, split, args.k);
      std::snprintf(buf, sizeof(buf), "%zu,%zu,recall,%zu,%.6g\n", ratio, seed, args.k, score);
      csv += buf;
      std::cout << "ratio " << ratio << " seed " << seed << " recall@" << args.k << " = " << score
                << "\n";
    }
  }
  std::FILE* f = std::fopen(args.out.c_str(), "w");
  if (!f) throw IoError("sweep-ratio: cannot open for writing: " + args.out);
  std::fwrite(csv.data(), 1, csv.size(), f);
  if (std::fclose(f) != 0) throw IoError("sweep-ratio: write failed: " + args.out);
  return 0;
}

struct CompareArgs {
  std::string losses = "focus,triplet,contrastive";
  std::string seeds = "1,2,3";
  std::string dims = "32,16,8";
  std::string ks = "1,2,4,8,16,32";
  std::size_t classes = 120;
  std::size_t dim = 32;
  std::string out;
};

int run_compare(const CompareArgs& args) {
  std::vector<std::string> losses;
  {
    std::size_t pos = 0;
    while (pos <= args.losses.size()) {
      const auto comma = args.losses.find(',', pos);
      losses.push_back(args.losses.substr(
          pos, comma == std::string::npos ? args.losses.size() - pos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  const auto seeds = parse_count_list(args.seeds, "--seeds");
  const auto dims = parse_count_list(args.dims, "--dims");
  const auto ks = parse_count_list(args.ks, "--ks");

  EvalReport combined;
  for (std::size_t seed : seeds) {
    SyntheticConfig data_cfg;
    data_cfg.n_classes = args.classes;
    data_cfg.d_in = args.dim;
    data_cfg.seed = seed;
    const LabeledDataset full = generate_synthetic(data_cfg);
    SplitMix64 split_rng(seed);
    const auto [train_ds, test_ds] = split_train_test(full, split_rng);
    const RetrievalSplit split = split_queries(test_ds.labels, 0.4, split_rng);

    for (const std::string& loss : losses) {
      MlpParams params;
      if (loss == "untrained") {
        SgdConfig cfg;
        cfg.seed = seed;
        cfg.epochs = 0;
        params = train(train_ds, cfg).params;
      } else {
        SgdConfig cfg;
        cfg.seed = seed;
        cfg.loss_kind = loss_kind_from_string(loss);
        params = train(train_ds, cfg).params;
      }
      const std::string tag = loss + "/seed" + std::to_string(seed);
      combined.append(evaluate(params, test_ds, split, dims, ks, seed, tag));
      std::cout << "evaluated " << tag << "\n";
    }
  }
  combined.write_csv(args.out);
  std::cout << "wrote " << combined.rows.size() << " rows -> " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"focus-ranking metric learning experiments"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic labeled dataset");
  gen_cmd->add_option("--classes", gen.cfg.n_classes, "number of classes (>= 2)")
      ->capture_default_str()
      ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(1) << 20));
  gen_cmd->add_option("--dim", gen.cfg.d_in, "feature dimension")->capture_default_str();
  gen_cmd->add_option("--seed", gen.cfg.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--instances-min", gen.cfg.instances_min, "min instances per class")
      ->capture_default_str();
  gen_cmd->add_option("--instances-max", gen.cfg.instances_max, "max instances per class")
      ->capture_default_str();
  gen_cmd->add_option("--gain-min", gen.cfg.gain_min, "low end of gain range")->capture_default_str();
  gen_cmd->add_option("--gain-max", gen.cfg.gain_max, "high end of gain range")->capture_default_str();
  gen_cmd->add_option("--bias-min", gen.cfg.bias_min, "low end of offset range")->capture_default_str();
  gen_cmd->add_option("--bias-max", gen.cfg.bias_max, "high end of offset range")->capture_default_str();
  gen_cmd->add_option("--rotation-planes", gen.cfg.rotation_planes, "plane rotations per instance")
      ->capture_default_str();
  gen_cmd->add_option("--rotation-max-angle", gen.cfg.rotation_max_angle, "max angle (radians)")
      ->capture_default_str();
  gen_cmd->add_option("--wrinkle", gen.cfg.wrinkle_amplitude, "wrinkle amplitude")
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen.cfg.noise_sigma, "white-noise sigma")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output dataset file")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train an embedding model");
  train_cmd->add_option("--data", tr.data, "training dataset file")->required();
  train_cmd->add_option("--config", tr.config, "key = value config file (defaults used if absent)");
  train_cmd->add_option("--loss", tr.loss, "focus | triplet | contrastive (overrides config)");
  train_cmd->add_option("--out", tr.out, "output model file")->required();
  train_cmd->add_option("--log", tr.log, "epoch-loss CSV file");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a test dataset");
  eval_cmd->add_option("--model", ev.model, "model file")->required();
  eval_cmd->add_option("--data", ev.data, "test dataset file")->required();
  eval_cmd->add_option("--dims", ev.dims, "PCA dimensions, comma-separated")->capture_default_str();
  eval_cmd->add_option("--ks", ev.ks, "recall cutoffs, comma-separated")->capture_default_str();
  eval_cmd->add_option("--query-frac", ev.query_frac, "query fraction per class")->capture_default_str();
  eval_cmd->add_option("--distractors", ev.distractors, "distractor dataset file (gallery only)");
  eval_cmd->add_option("--seed", ev.seed, "split/clustering seed")->capture_default_str();
  eval_cmd->add_option("--label", ev.label, "loss column value in the CSV")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "output CSV file")->required();

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check of analytic gradients");
  gc_cmd->add_option("--trials", gc.trials, "number of random trials")->capture_default_str();
  gc_cmd->add_option("--eps", gc.eps, "finite-difference step")->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed, "trial seed")->capture_default_str();
  gc_cmd->add_flag("--corrupt-gradients", gc.corrupt,
                   "debug: skew analytic gradients (must make the check fail)");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep-ratio", "recall vs negative-positive ratio");
  sweep_cmd->add_option("--ratios", sw.ratios, "ratios, comma-separated")->capture_default_str();
  sweep_cmd->add_option("--seeds", sw.seeds, "seeds, comma-separated")->capture_default_str();
  sweep_cmd->add_option("--k", sw.k, "recall cutoff")->capture_default_str();
  sweep_cmd->add_option("--classes", sw.classes, "synthetic classes per seed")->capture_default_str();
  sweep_cmd->add_option("--dim", sw.dim, "synthetic feature dimension")->capture_default_str();
  sweep_cmd->add_option("--out", sw.out, "output CSV file")->required();

  CompareArgs cp;
  auto* compare_cmd = app.add_subcommand("compare", "evaluate several losses side by side");
  compare_cmd->add_option("--losses", cp.losses, "losses (focus,triplet,contrastive,untrained)")
      ->capture_default_str();
  compare_cmd->add_option("--seeds", cp.seeds, "seeds, comma-separated")->capture_default_str();
  compare_cmd->add_option("--dims", cp.dims, "PCA dimensions")->capture_default_str();
  compare_cmd->add_option("--ks", cp.ks, "recall cutoffs")->capture_default_str();
  compare_cmd->add_option("--classes", cp.classes, "synthetic classes per seed")->capture_default_str();
  compare_cmd->add_option("--dim", cp.dim, "synthetic feature dimension")->capture_default_str();
  compare_cmd->add_option("--out", cp.out, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_data(gen);
    if (train_cmd->parsed()) return run_train(tr);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (gc_cmd->parsed()) return run_gradcheck(gc);
    if (sweep_cmd->parsed()) return run_sweep_ratio(sw);
    if (compare_cmd->parsed()) return run_compare(cp);
  } catch (const focusrank::IoError& e) {
    std::cerr << "focusrank: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "focusrank: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "focusrank: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
