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

// Command-line driver: train-recsys, train-textclf, eval, export, stats.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ant/persist.hpp"
#include "ant/random.hpp"
#include "ant/tasks.hpp"
#include "config.hpp"
#include "runner.hpp"

namespace {

using ant::app::RunConfig;

void add_run_options(CLI::App& cmd, RunConfig& c) {
  cmd.add_option("--config", "JSON config file; flags override its values");
  cmd.add_option("--data", c.data, "ratings file (recsys) or labeled training file (textclf)");
  cmd.add_option("--out", c.out, "output directory for the trained model");
  cmd.add_option("--dim", c.dim, "embedding width d");
  cmd.add_flag("--dense,!--no-dense", c.dense, "train a full embedding table");
  cmd.add_option("--anchors", c.anchors, "number of anchors K");
  cmd.add_option("--anchor-init", c.anchor_init, "frequency | tfidf | kmeanspp | random");
  cmd.add_flag("--nonneg,!--no-nonneg", c.nonneg, "keep T non-negative");
  cmd.add_option("--lambda1", c.lambda1, "per-anchor penalty (nbANT objective)");
  cmd.add_option("--lambda2", c.lambda2, "l1 weight on T");
  cmd.add_option("--ortho-weight", c.ortho_weight, "orthogonality penalty on A");
  cmd.add_option("--neg-pair-weight", c.neg_pair_weight, "penalty on negative pairs");
  cmd.add_option("--mask-path", c.mask_path, "relation file (P/N lines) for the domain mask");
  cmd.add_option("--transform-grad", c.transform_grad,
                 "active (pruned entries stay pruned) | full_row");
  cmd.add_flag("--nbant,!--no-nbant", c.nbant, "adapt the number of anchors");
  cmd.add_option("--delta-k", c.delta_k, "anchors added or removed per adaptation");
  cmd.add_option("--nbant-objective", c.nbant_objective, "validation | training");
  cmd.add_option("--nbant-tol", c.nbant_tol, "relative tolerance of the trend test");
  cmd.add_option("--epochs", c.epochs);
  cmd.add_option("--batch-size", c.batch_size);
  cmd.add_option("--lr", c.lr);
  cmd.add_option("--lr-decay", c.lr_decay, "factor applied every decay-step steps");
  cmd.add_option("--decay-step", c.decay_step);
  cmd.add_option("--init-std", c.init_std, "stddev of dense table initialization");
  cmd.add_option("--window", c.window, "co-occurrence window for kmeanspp anchors");
  cmd.add_option("--train-fraction", c.train_fraction);
  cmd.add_option("--val-fraction", c.val_fraction);
  cmd.add_option("--test-fraction", c.test_fraction);
  cmd.add_option("--seed", c.seed);
  cmd.add_option("--threads", c.threads, "worker threads for batch gradients");
  cmd.add_flag("--deterministic", c.deterministic,
               "fixed-order reduction (always used; kept for scripts)");
  cmd.add_flag("--keep-best,!--no-keep-best", c.keep_best,
               "report the best validation epoch instead of the last");
}

std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ant::Error(ant::ErrorCode::kIo, "cannot open " + path);
  return nlohmann::json::parse(in);
}

ant::LabeledCorpus read_labeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ant::Error(ant::ErrorCode::kIo, "cannot open " + path);
  return ant::read_labeled_corpus(in);
}

int train_recsys(const RunConfig& c) {
  if (c.data.empty()) throw ant::Error(ant::ErrorCode::kInvalidArgument, "--data is required");
  const auto data = ant::load_movielens_file(c.data, ant::detect_ratings_format(c.data));
  std::cout << "ratings=" << data.triples.size() << " users=" << data.n_users
            << " items=" << data.n_items << std::endl;
  const auto r = ant::app::run_recsys(c, data, &std::cout);
  std::cout << "result epoch=" << r.reported_epoch << " val_mse=" << r.val_mse
            << " test_mse=" << r.test_mse << " params=" << r.total_params
            << " K=" << r.final_k << " seconds=" << r.seconds << std::endl;
  return 0;
}

int train_textclf(RunConfig c) {
  c.task = "textclf";
  if (c.data.empty()) throw ant::Error(ant::ErrorCode::kInvalidArgument, "--data is required");
  auto train = read_labeled(c.data);
  ant::LabeledCorpus val;
  ant::LabeledCorpus test;
  if (c.val_data.empty() || c.test_data.empty()) {
    // Split the single file by the configured fractions.
    ant::Rng rng(c.seed);
    const auto order = ant::shuffled_order(train.docs.size(), rng);
    const auto n = static_cast<double>(order.size());
    const auto n_train = static_cast<std::size_t>(c.train_fraction * n);
    const auto n_val = static_cast<std::size_t>(c.val_fraction * n);
    ant::LabeledCorpus parts[3];
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto& p = parts[i < n_train ? 0 : (i < n_train + n_val ? 1 : 2)];
      p.docs.push_back(train.docs[order[i]]);
      p.labels.push_back(train.labels[order[i]]);
    }
    train = std::move(parts[0]);
    val = std::move(parts[1]);
    test = std::move(parts[2]);
  } else {
    val = read_labeled(c.val_data);
    test = read_labeled(c.test_data);
  }
  const auto r = ant::app::run_textclf(c, train, val, test, &std::cout);
  std::cout << "result epoch=" << r.reported_epoch << " val_acc=" << r.val_accuracy
            << " test_acc=" << r.test_accuracy << " params=" << r.params.total
            << " K=" << r.final_k << " seconds=" << r.seconds << std::endl;
  return 0;
}

int eval_model(const std::string& dir, const std::string& data_path) {
  const auto meta = read_json(dir + "/meta.json");
  const std::string task = meta.at("task");
  if (task == "recsys") {
    const auto users = ant::load_model(dir + "/users.antb");
    const auto items = ant::load_model(dir + "/items.antb");
    const double mean = meta.at("global_mean");
    std::unordered_map<std::int64_t, ant::Index> uid;
    std::unordered_map<std::int64_t, ant::Index> iid;
    const auto uraw = meta.at("user_ids").get<std::vector<std::int64_t>>();
    const auto iraw = meta.at("item_ids").get<std::vector<std::int64_t>>();
    for (ant::Index i = 0; i < uraw.size(); ++i) uid.emplace(uraw[i], i);
    for (ant::Index i = 0; i < iraw.size(); ++i) iid.emplace(iraw[i], i);
    const auto data = ant::load_movielens_file(data_path, ant::detect_ratings_format(data_path));
    std::vector<double> u(users.dim());
    std::vector<double> v(items.dim());
    std::vector<double> pred;
    std::vector<double> truth;
    std::size_t skipped = 0;
    for (const auto& r : data.triples) {
      auto fu = uid.find(data.user_raw[r.user]);
      auto fi = iid.find(data.item_raw[r.item]);
      if (fu == uid.end() || fi == iid.end()) {
        ++skipped;
        continue;
      }
      ant::lookup_row_into(fu->second, users.transform, users.anchors, u);
      ant::lookup_row_into(fi->second, items.transform, items.anchors, v);
      pred.push_back(ant::mf_predict(u, v, mean));
      truth.push_back(r.rating);
    }
    std::cout << "mse=" << ant::evaluate(pred, truth, ant::Metric::kMse)
              << " ratings=" << pred.size() << " skipped=" << skipped << std::endl;
    return 0;
  }
  if (task == "textclf") {
    const auto emb = ant::load_model(dir + "/embedding.antb");
    std::ifstream vin(dir + "/vocab.txt");
    std::vector<std::string> tokens;
    std::vector<std::size_t> freq;
    for (std::string t; std::getline(vin, t);) {
      tokens.push_back(t);
      freq.push_back(1);
    }
    const ant::Vocabulary vocab(std::move(tokens), std::move(freq));
    const auto rows = meta.at("weights").get<std::vector<std::vector<double>>>();
    const auto w = ant::DenseMatrix::from_rows(rows);
    const auto b = meta.at("bias").get<std::vector<double>>();
    const auto data = ant::encode(read_labeled(data_path), vocab, meta.at("n_classes"));
    std::vector<double> pred;
    std::vector<double> truth;
    std::vector<double> row(emb.dim());
    for (const auto& ex : data.examples) {
      std::vector<double> e(emb.dim(), 0.0);
      for (auto t : ex.tokens) {
        ant::lookup_row_into(t, emb.transform, emb.anchors, row);
        for (std::size_t c = 0; c < e.size(); ++c) e[c] += row[c];
      }
      if (!ex.tokens.empty()) {
        for (double& x : e) x /= static_cast<double>(ex.tokens.size());
      }
      pred.push_back(static_cast<double>(ant::argmax(ant::textclf_predict(w, b, e))));
      truth.push_back(static_cast<double>(ex.label));
    }
    std::cout << "accuracy=" << ant::evaluate(pred, truth, ant::Metric::kAccuracy)
              << " examples=" << pred.size() << " unknown_tokens=" << data.unknown_tokens
              << std::endl;
    return 0;
  }
  throw ant::Error(ant::ErrorCode::kParse, "meta.json: unknown task " + task);
}

int export_model(const std::string& model_path, const std::string& vocab_path,
                 const std::string& format, const std::string& out) {
  const auto model = ant::load_model(model_path);
  std::vector<std::string> tokens;
  if (!vocab_path.empty()) {
    std::ifstream in(vocab_path);
    if (!in) throw ant::Error(ant::ErrorCode::kIo, "cannot open " + vocab_path);
    for (std::string t; std::getline(in, t);) tokens.push_back(t);
  } else {
    for (ant::Index i = 0; i < model.vocab_size(); ++i) tokens.push_back(std::to_string(i));
  }
  const auto fmt = ant::parse_export_format(format);
  const auto s = out.empty() ? ant::export_embeddings(model, tokens, std::cout, fmt)
                             : ant::export_embeddings(model, tokens, out, fmt);
  std::cerr << "exported " << s.lines << " rows K=" << s.k << " d=" << s.d
            << " total_params=" << s.params.total << std::endl;
  return 0;
}

int stats(const std::string& model_path) {
  const auto model = ant::load_model(model_path);
  const auto p = ant::count_params(model);
  std::cout << "V=" << model.vocab_size() << " K=" << model.num_anchors()
            << " d=" << model.dim() << " anchor_params=" << p.anchor
            << " nnz=" << p.transform_nnz << " total_params=" << p.total
            << " zero_rows=" << p.zero_rows
            << " file_bytes=" << std::filesystem::file_size(model_path) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor & Transform embeddings: train, evaluate and inspect models"};
  app.require_subcommand(1);

  RunConfig cfg;
  try {
    if (const auto path = find_config_arg(argc, argv); !path.empty()) {
      cfg = ant::app::load_config(path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }

  auto* recsys = app.add_subcommand("train-recsys", "matrix factorization on ratings");
  add_run_options(*recsys, cfg);
  auto* textclf = app.add_subcommand("train-textclf", "bag-of-embeddings text classifier");
  add_run_options(*textclf, cfg);
  textclf->add_option("--val-data", cfg.val_data, "labeled validation file");
  textclf->add_option("--test-data", cfg.test_data, "labeled test file");

  std::string model_dir;
  std::string data_path;
  auto* eval = app.add_subcommand("eval", "evaluate a saved model directory");
  eval->add_option("--model-dir", model_dir)->required();
  eval->add_option("--data", data_path)->required();

  std::string model_path;
  std::string vocab_path;
  std::string format = "text_vectors";
  std::string out_path;
  auto* exp = app.add_subcommand("export", "write embeddings or a sparsity report");
  exp->add_option("--model", model_path)->required();
  exp->add_option("--vocab", vocab_path, "token per line; row indices when omitted");
  exp->add_option("--format", format, "text_vectors | sparse_report");
  exp->add_option("--out", out_path, "output file; stdout when omitted");

  auto* st = app.add_subcommand("stats", "parameter counts of a model file");
  st->add_option("--model", model_path)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (recsys->parsed()) {
      cfg.task = "recsys";
      return train_recsys(cfg);
    }
    if (textclf->parsed()) return train_textclf(cfg);
    if (eval->parsed()) return eval_model(model_dir, data_path);
    if (exp->parsed()) return export_model(model_path, vocab_path, format, out_path);
    if (st->parsed()) return stats(model_path);
  } catch (const ant::Error& e) {
    std::cerr << "error [" << ant::to_string(e.code()) << "]: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
