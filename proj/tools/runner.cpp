// Copyright 2026 The ANT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>

#include "ant/nbant.hpp"
#include "ant/persist.hpp"

namespace ant::app {

namespace {

using Clock = std::chrono::steady_clock;

YogiConfig yogi_config(const RunConfig& cfg) {
  YogiConfig y;
  y.lr = cfg.lr;
  y.decay_factor = cfg.lr_decay;
  y.decay_every = cfg.decay_step;
  return y;
}

std::unique_ptr<EmbeddingTable> make_table(const RunConfig& cfg, std::size_t rows,
                                           std::size_t k, const AnchorPlan& plan,
                                           Regularization reg, std::uint64_t seed) {
  if (cfg.dense) return std::make_unique<DenseEmbedding>(
      DenseEmbedding::gaussian(rows, cfg.dim, cfg.init_std, seed));
  AnchorPlan p = plan;
  p.k = k;
  p.seed = seed;
  reg.nonneg = cfg.nonneg;
  reg.lambda2 = cfg.lambda2;
  reg.ortho_weight = cfg.ortho_weight;
  reg.neg_pair_weight = cfg.neg_pair_weight;
  return std::make_unique<AntEmbedding>(make_ant_model(rows, p, cfg.dim, std::move(reg), seed),
                                        parse_transform_gradient(cfg.transform_grad));
}

/// Hooks that make the epoch loop task-independent.
struct LoopHooks {
  std::function<double()> val_metric;
  bool higher_is_better = false;
  std::function<double()> objective_loss;  // summed Bregman loss for the trend
  std::function<void(std::size_t epoch)> on_best;
};

struct LoopResult {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;
};

LoopResult run_epochs(TaskHarness& harness, const RunConfig& cfg, const LoopHooks& hooks,
                      const char* metric_name, std::ostream* log) {
  StepClock clock(yogi_config(cfg));
  Rng order_rng(cfg.seed + 101);
  std::optional<NbAntController> controller;
  std::vector<AntEmbedding*> tables;
  if (cfg.nbant) {
    tables = ant_tables(harness);
    controller.emplace(tables.front()->num_anchors(), cfg.delta_k, cfg.nbant_tol,
                       cfg.seed + 202);
  }
  const SvaObjective objective{cfg.lambda1, cfg.lambda2};

  LoopResult out;
  std::optional<double> best;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = shuffled_order(harness.num_examples(), order_rng);
    const EpochReport rep = train_epoch(harness, order, cfg.batch_size, clock);
    EpochLog e;
    e.epoch = epoch;
    e.train_loss = rep.train_loss;
    e.aborted = rep.aborted;
    e.val_metric = hooks.val_metric();
    e.nnz = rep.nnz;
    e.k = rep.k;
    e.sva_obj = sva_objective(hooks.objective_loss(), rep.nnz, rep.k, objective);
    out.epochs.push_back(e);
    if (log != nullptr) *log << format_epoch(e, metric_name) << std::endl;

    const bool better = !best || (hooks.higher_is_better ? e.val_metric > *best
                                                         : e.val_metric < *best);
    if (better || !cfg.keep_best) {
      best = e.val_metric;
      out.best_epoch = epoch;
      hooks.on_best(epoch);
    }
    if (rep.aborted) {
      if (log != nullptr) *log << "non-finite loss or gradient; stopping" << std::endl;
      break;
    }
    if (controller) {
      const auto a = controller->adapt(tables, e.sva_obj);
      if (log != nullptr && a.action != AdaptAction::kKeep) {
        *log << "nbant " << to_string(a.action) << " K=" << a.k_before << "->" << a.k_after
             << std::endl;
      }
    }
  }
  return out;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<std::size_t> by_frequency(std::span<const Rating> triples, std::size_t n,
                                      bool users, std::size_t k) {
  std::vector<std::size_t> count(n, 0);
  for (const auto& r : triples) ++count[users ? r.user : r.item];
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::size_t a, std::size_t b) { return count[a] > count[b]; });
  ids.resize(std::min(k, n));
  return ids;
}

nlohmann::json epochs_json(const std::vector<EpochLog>& epochs) {
  auto arr = nlohmann::json::array();
  for (const auto& e : epochs) {
    arr.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss},
                   {"val_metric", e.val_metric}, {"nnz", e.nnz}, {"K", e.k},
                   {"sva_obj", e.sva_obj}});
  }
  return arr;
}

}  // namespace

std::string format_epoch(const EpochLog& e, const char* metric_name) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "epoch=%zu train_loss=%.6f %s=%.6f nnz=%zu K=%zu sva_obj=%.6f",
                e.epoch, e.train_loss, metric_name, e.val_metric, e.nnz, e.k, e.sva_obj);
  return buf;
}

AntModel to_ant_model(const EmbeddingTable& table) {
  if (const auto* ant = dynamic_cast<const AntEmbedding*>(&table)) return ant->model();
  const auto* dense = dynamic_cast<const DenseEmbedding*>(&table);
  if (dense == nullptr) throw Error(ErrorCode::kInvalidArgument, "unknown embedding table");
  AntModel m;
  m.anchors = dense->table();
  m.transform = SparseRowMatrix(dense->size(), dense->size(), true);
  for (Index r = 0; r < dense->size(); ++r) m.transform.set(r, r, 1.0);
  return m;
}

RecsysResult run_recsys(const RunConfig& cfg, const RatingsDataset& data, std::ostream* log) {
  cfg.validate();
  if (!cfg.mask_path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mask_path applies to textclf only");
  }
  const auto t0 = Clock::now();
  const auto parts =
      split(data, {cfg.train_fraction, cfg.val_fraction, cfg.test_fraction}, cfg.seed);

  const std::size_t ku = cfg.anchors;
  const std::size_t ki = cfg.item_anchors == 0 ? cfg.anchors : cfg.item_anchors;
  AnchorPlan user_plan;
  AnchorPlan item_plan;
  const auto strategy = parse_anchor_strategy(cfg.anchor_init);
  user_plan.strategy = item_plan.strategy = strategy;
  if (!cfg.dense && strategy == AnchorStrategy::kFrequency) {
    user_plan.anchor_ids = by_frequency(parts.train.triples, data.n_users, true, ku);
    item_plan.anchor_ids = by_frequency(parts.train.triples, data.n_items, false, ki);
  } else if (!cfg.dense && strategy != AnchorStrategy::kRandom) {
    throw Error(ErrorCode::kInvalidArgument,
                "recsys supports random or frequency anchors, got " + cfg.anchor_init);
  }

  MatrixFactorization mf(make_table(cfg, data.n_users, ku, user_plan, {}, cfg.seed + 1),
                         make_table(cfg, data.n_items, ki, item_plan, {}, cfg.seed + 2),
                         parts.train, cfg.threads);

  RecsysResult res;
  res.moved_to_train = parts.moved_to_train;
  std::optional<std::pair<AntModel, AntModel>> saved;
  const bool objective_on_train = cfg.nbant_objective == "training";
  LoopHooks hooks;
  hooks.val_metric = [&] { return mf.mse(parts.val); };
  hooks.objective_loss = [&] {
    return mf.half_sse(objective_on_train ? parts.train : parts.val);
  };
  hooks.on_best = [&](std::size_t epoch) {
    res.reported_epoch = epoch;
    res.test_mse = mf.mse(parts.test);
    res.users = mf.users().count();
    res.items = mf.items().count();
    res.reported_k = mf.users().num_anchors();
    if (!cfg.out.empty()) saved.emplace(to_ant_model(mf.users()), to_ant_model(mf.items()));
  };
  auto loop = run_epochs(mf, cfg, hooks, "val_mse", log);
  res.epochs = std::move(loop.epochs);
  res.val_mse = res.epochs.at(loop.best_epoch - 1).val_metric;
  res.total_params = res.users.total + res.items.total;
  res.final_k = mf.users().num_anchors();
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  if (!cfg.out.empty() && saved) {
    std::filesystem::create_directories(cfg.out);
    save_model(saved->first, cfg.out + "/users.antb");
    save_model(saved->second, cfg.out + "/items.antb");
    nlohmann::json meta;
    meta["task"] = "recsys";
    meta["global_mean"] = mf.global_mean();
    meta["user_ids"] = data.user_raw;
    meta["item_ids"] = data.item_raw;
    meta["config"] = cfg;
    meta["metrics"] = {{"epoch", res.reported_epoch}, {"val_mse", res.val_mse},
                       {"test_mse", res.test_mse}, {"total_params", res.total_params}};
    meta["epochs"] = epochs_json(res.epochs);
    write_json(cfg.out + "/meta.json", meta);
  }
  return res;
}

TextclfResult run_textclf(const RunConfig& cfg, const LabeledCorpus& train,
                          const LabeledCorpus& val, const LabeledCorpus& test,
                          std::ostream* log) {
  cfg.validate();
  const auto t0 = Clock::now();
  const Vocabulary vocab = build_vocab(train.docs);
  std::size_t n_classes = 0;
  for (const auto* part : {&train, &val, &test}) {
    for (auto l : part->labels) n_classes = std::max(n_classes, l + 1);
  }
  const TextDataset train_set = encode(train, vocab, n_classes);
  const TextDataset val_set = encode(val, vocab, n_classes);
  const TextDataset test_set = encode(test, vocab, n_classes);

  AnchorPlan plan;
  plan.strategy = parse_anchor_strategy(cfg.anchor_init);
  plan.k = cfg.anchors;
  plan.seed = cfg.seed + 3;
  Regularization reg;
  if (!cfg.dense) {
    std::optional<DenseMatrix> features;
    AnchorInputs inputs;
    inputs.docs = &train.docs;
    if (plan.strategy == AnchorStrategy::kKmeansPP) {
      features = build_cooccurrence(train.docs, vocab, cfg.window).to_features();
      inputs.features = &*features;
    }
    plan.anchor_ids = select_anchors(plan, vocab, inputs);
    if (!cfg.mask_path.empty()) {
      std::ifstream rel(cfg.mask_path);
      if (!rel) throw Error(ErrorCode::kIo, "cannot open relations " + cfg.mask_path);
      const auto loaded = read_relations(rel, vocab);
      auto mask = build_domain_mask(loaded.graph, vocab.size(), plan.k, plan.anchor_ids);
      reg.mask_complement = mask.complement;
      reg.negatives = loaded.graph.negative_list();
      if (log != nullptr) {
        *log << "relations: " << loaded.graph.positive().size() << " positive, "
             << reg.negatives.size() << " negative, " << loaded.skipped + mask.skipped
             << " skipped" << std::endl;
      }
    }
  }
  TextClassifier clf(make_table(cfg, vocab.size(), cfg.anchors, plan, reg, cfg.seed + 3),
                     train_set, cfg.seed + 4, cfg.threads);

  TextclfResult res;
  res.vocab_size = vocab.size();
  std::optional<std::pair<AntModel, std::pair<DenseMatrix, DenseMatrix>>> saved;
  const bool objective_on_train = cfg.nbant_objective == "training";
  LoopHooks hooks;
  hooks.higher_is_better = true;
  hooks.val_metric = [&] { return clf.accuracy(val_set); };
  hooks.objective_loss = [&] {
    return clf.total_loss(objective_on_train ? train_set : val_set);
  };
  hooks.on_best = [&](std::size_t epoch) {
    res.reported_epoch = epoch;
    res.test_accuracy = clf.accuracy(test_set);
    res.params = clf.embedding().count();
    if (!cfg.out.empty()) {
      saved.emplace(to_ant_model(clf.embedding()),
                    std::make_pair(clf.weights().value, clf.bias().value));
    }
  };
  auto loop = run_epochs(clf, cfg, hooks, "val_acc", log);
  res.epochs = std::move(loop.epochs);
  res.val_accuracy = res.epochs.at(loop.best_epoch - 1).val_metric;
  res.final_k = clf.embedding().num_anchors();
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  if (!cfg.out.empty() && saved) {
    std::filesystem::create_directories(cfg.out);
    save_model(saved->first, cfg.out + "/embedding.antb");
    std::ofstream voc(cfg.out + "/vocab.txt");
    for (const auto& tok : vocab.tokens()) voc << tok << '\n';
    const auto& [w, b] = saved->second;
    nlohmann::json meta;
    meta["task"] = "textclf";
    meta["n_classes"] = n_classes;
    auto rows = nlohmann::json::array();
    for (Index r = 0; r < w.rows(); ++r) {
      rows.push_back(std::vector<double>(w.row(r).begin(), w.row(r).end()));
    }
    meta["weights"] = rows;
    meta["bias"] = std::vector<double>(b.values().begin(), b.values().end());
    meta["config"] = cfg;
    meta["metrics"] = {{"epoch", res.reported_epoch}, {"val_accuracy", res.val_accuracy},
                       {"test_accuracy", res.test_accuracy}, {"total_params", res.params.total}};
    meta["epochs"] = epochs_json(res.epochs);
    write_json(cfg.out + "/meta.json", meta);
  }
  return res;
}

}  // namespace ant::app
