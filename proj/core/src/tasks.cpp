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

#include "ant/tasks.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "ant/losses.hpp"
#include "ant/random.hpp"

namespace ant {

namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
}

std::int64_t parse_int(std::string_view s, std::size_t line_no, const char* field) {
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(buf.c_str(), &end, 10);
  if (buf.empty() || end != buf.c_str() + buf.size() || errno != 0) {
    parse_error(line_no, std::string("bad ") + field + " '" + buf + "'");
  }
  return v;
}

double parse_double(std::string_view s, std::size_t line_no, const char* field) {
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || errno != 0 || !std::isfinite(v)) {
    parse_error(line_no, std::string("bad ") + field + " '" + buf + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

class IdMap {
 public:
  Index get(std::int64_t raw, std::vector<std::int64_t>& raws) {
    auto [it, fresh] = ids_.emplace(raw, raws.size());
    if (fresh) raws.push_back(raw);
    return it->second;
  }

 private:
  std::unordered_map<std::int64_t, Index> ids_;
};

double mean_rating(std::span<const Rating> triples) {
  if (triples.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : triples) s += r.rating;
  return s / static_cast<double>(triples.size());
}

}  // namespace

RatingsDataset load_movielens(std::istream& in, RatingsFormat format) {
  RatingsDataset data;
  IdMap users;
  IdMap items;
  std::string line;
  std::size_t line_no = 0;
  const std::string_view sep = format == RatingsFormat::kCsvHeader ? "," : "::";
  if (format == RatingsFormat::kCsvHeader) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "ratings: missing header");
    ++line_no;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line, sep);
    if (f.size() < 3 || f.size() > 4) parse_error(line_no, "expected 3 or 4 fields");
    const auto user = parse_int(f[0], line_no, "user id");
    const auto item = parse_int(f[1], line_no, "item id");
    const double rating = parse_double(f[2], line_no, "rating");
    if (rating < kMinRating || rating > kMaxRating) {
      parse_error(line_no, "rating " + std::string(f[2]) + " outside [0.5, 5]");
    }
    if (f.size() == 4) parse_int(f[3], line_no, "timestamp");
    data.triples.push_back(
        {users.get(user, data.user_raw), items.get(item, data.item_raw), rating});
  }
  data.n_users = data.user_raw.size();
  data.n_items = data.item_raw.size();
  data.global_mean = mean_rating(data.triples);
  return data;
}

RatingsDataset load_movielens_file(const std::string& path, RatingsFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ratings file " + path);
  try {
    return load_movielens(in, format);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

RatingsFormat detect_ratings_format(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ratings file " + path);
  std::string first;
  std::getline(in, first);
  return first.find("::") != std::string::npos ? RatingsFormat::kLegacyDoubleColon
                                               : RatingsFormat::kCsvHeader;
}

RatingsSplit split(const RatingsDataset& data, std::array<double, 3> fractions,
                   std::uint64_t seed) {
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "split: negative fraction");
  }
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split: fractions must sum to 1");
  }
  const std::size_t n = data.triples.size();
  Rng rng(seed);
  const auto order = shuffled_order(n, rng);
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n)));
  const auto n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n))));

  RatingsSplit out;
  for (auto* part : {&out.train, &out.val, &out.test}) {
    part->n_users = data.n_users;
    part->n_items = data.n_items;
    part->user_raw = data.user_raw;
    part->item_raw = data.item_raw;
  }
  std::vector<char> seen_user(data.n_users, 0);
  std::vector<char> seen_item(data.n_items, 0);
  for (std::size_t i = 0; i < n_train; ++i) {
    const auto& r = data.triples[order[i]];
    out.train.triples.push_back(r);
    seen_user[r.user] = 1;
    seen_item[r.item] = 1;
  }
  for (std::size_t i = n_train; i < n; ++i) {
    const auto& r = data.triples[order[i]];
    if (!seen_user[r.user] || !seen_item[r.item]) {
      out.train.triples.push_back(r);
      seen_user[r.user] = 1;
      seen_item[r.item] = 1;
      ++out.moved_to_train;
      continue;
    }
    (i < n_train + n_val ? out.val : out.test).triples.push_back(r);
  }
  if (out.train.triples.empty() || (fractions[1] > 0.0 && out.val.triples.empty()) ||
      (fractions[2] > 0.0 && out.test.triples.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "split: a requested part came out empty");
  }
  const double mean = mean_rating(out.train.triples);
  out.train.global_mean = out.val.global_mean = out.test.global_mean = mean;
  return out;
}

double mf_predict(std::span<const double> user, std::span<const double> item,
                  double global_mean) {
  if (user.size() != item.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mf_predict: embedding widths differ");
  }
  return global_mean + dot(user, item);
}

LabeledCorpus read_labeled_corpus(std::istream& in) {
  LabeledCorpus out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) parse_error(line_no, "expected <label>\\t<tokens>");
    const auto label = parse_int(std::string_view(line).substr(0, tab), line_no, "label");
    if (label < 0) parse_error(line_no, "negative label");
    std::istringstream words(line.substr(tab + 1));
    Document doc;
    for (std::string w; words >> w;) doc.push_back(std::move(w));
    out.docs.push_back(std::move(doc));
    out.labels.push_back(static_cast<std::size_t>(label));
  }
  return out;
}

TextDataset encode(const LabeledCorpus& corpus, const Vocabulary& vocab,
                   std::size_t n_classes) {
  if (corpus.docs.size() != corpus.labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "encode: one label per document");
  }
  TextDataset out;
  out.n_classes = n_classes;
  out.vocab_size = vocab.size();
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    if (corpus.labels[i] >= n_classes) {
      throw Error(ErrorCode::kOutOfRange, "encode: label " + std::to_string(corpus.labels[i]) +
                                              " >= n_classes");
    }
    TextExample ex;
    ex.label = corpus.labels[i];
    for (const auto& tok : corpus.docs[i]) {
      if (auto id = vocab.find(tok)) {
        ex.tokens.push_back(*id);
      } else {
        ++out.unknown_tokens;
      }
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

std::vector<double> textclf_predict(const DenseMatrix& w, std::span<const double> b,
                                    std::span<const double> e) {
  if (w.cols() != e.size() || w.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "textclf_predict: shape mismatch");
  }
  std::vector<double> logits(w.rows());
  for (Index c = 0; c < w.rows(); ++c) logits[c] = dot(w.row(c), e) + b[c];
  return softmax(logits);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double evaluate(std::span<const double> predictions, std::span<const double> targets,
                Metric metric) {
  if (predictions.size() != targets.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "evaluate: length mismatch");
  }
  if (predictions.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluate: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (metric == Metric::kMse) {
      const double r = predictions[i] - targets[i];
      acc += r * r;
    } else {
      acc += predictions[i] == targets[i] ? 1.0 : 0.0;
    }
  }
  return acc / static_cast<double>(predictions.size());
}

void parallel_for_each(std::size_t n, std::size_t threads,
                       const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  tbb::task_arena arena(static_cast<int>(threads));
  arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n),
                      [&](const tbb::blocked_range<std::size_t>& r) {
                        for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
                      });
  });
}

// ---------------------------------------------------------------------------
// MatrixFactorization
// ---------------------------------------------------------------------------

MatrixFactorization::MatrixFactorization(std::unique_ptr<EmbeddingTable> users,
                                         std::unique_ptr<EmbeddingTable> items,
                                         const RatingsDataset& train, std::size_t threads)
    : users_(std::move(users)),
      items_(std::move(items)),
      train_(train.triples),
      global_mean_(train.global_mean),
      threads_(threads) {
  if (!users_ || !items_) throw Error(ErrorCode::kInvalidArgument, "MF: missing table");
  if (users_->dim() != items_->dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "MF: user and item widths differ");
  }
  if (users_->size() < train.n_users || items_->size() < train.n_items) {
    throw Error(ErrorCode::kDimensionMismatch, "MF: table smaller than the id range");
  }
}

BatchLoss MatrixFactorization::accumulate(std::span<const std::size_t> batch) {
  const std::size_t d = users_->dim();
  const std::size_t n = batch.size();
  u_buf_.resize(n * d);
  v_buf_.resize(n * d);
  r_buf_.resize(n);
  parallel_for_each(n, threads_, [&](std::size_t j) {
    const Rating& ex = train_.at(batch[j]);
    std::span<double> u(u_buf_.data() + j * d, d);
    std::span<double> v(v_buf_.data() + j * d, d);
    users_->embed_row(ex.user, u);
    items_->embed_row(ex.item, v);
    r_buf_[j] = mf_predict(u, v, global_mean_) - ex.rating;
  });
  BatchLoss loss;
  std::vector<double> g(d);
  for (std::size_t j = 0; j < n; ++j) {
    const Rating& ex = train_[batch[j]];
    const double r = r_buf_[j];
    loss.data += 0.5 * r * r;
    const double* u = u_buf_.data() + j * d;
    const double* v = v_buf_.data() + j * d;
    for (std::size_t c = 0; c < d; ++c) g[c] = r * v[c];
    users_->accumulate(ex.user, g);
    for (std::size_t c = 0; c < d; ++c) g[c] = r * u[c];
    items_->accumulate(ex.item, g);
  }
  loss.penalty = users_->add_penalties() + items_->add_penalties();
  return loss;
}

bool MatrixFactorization::gradients_finite() const {
  return users_->gradients_finite() && items_->gradients_finite();
}

void MatrixFactorization::apply(const StepContext& ctx) {
  users_->apply(ctx);
  items_->apply(ctx);
}

void MatrixFactorization::discard() {
  users_->discard();
  items_->discard();
}

double MatrixFactorization::predict(Index user, Index item) const {
  std::vector<double> u(users_->dim());
  std::vector<double> v(items_->dim());
  users_->embed_row(user, u);
  items_->embed_row(item, v);
  return mf_predict(u, v, global_mean_);
}

std::vector<double> MatrixFactorization::squared_errors(std::span<const Rating> triples) const {
  std::vector<double> out(triples.size());
  const std::size_t d = users_->dim();
  parallel_for_each(triples.size(), threads_, [&](std::size_t j) {
    std::vector<double> u(d);
    std::vector<double> v(d);
    users_->embed_row(triples[j].user, u);
    items_->embed_row(triples[j].item, v);
    const double r = mf_predict(u, v, global_mean_) - triples[j].rating;
    out[j] = r * r;
  });
  return out;
}

double MatrixFactorization::data_loss(std::span<const std::size_t> examples) const {
  std::vector<Rating> picked;
  picked.reserve(examples.size());
  for (auto i : examples) picked.push_back(train_.at(i));
  double s = 0.0;
  for (double e : squared_errors(picked)) s += e;
  return 0.5 * s;
}

double MatrixFactorization::mse(const RatingsDataset& data) const {
  if (data.triples.empty()) throw Error(ErrorCode::kInvalidArgument, "mse: empty dataset");
  double s = 0.0;
  for (double e : squared_errors(data.triples)) s += e;
  return s / static_cast<double>(data.triples.size());
}

double MatrixFactorization::half_sse(const RatingsDataset& data) const {
  double s = 0.0;
  for (double e : squared_errors(data.triples)) s += e;
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// TextClassifier
// ---------------------------------------------------------------------------

TextClassifier::TextClassifier(std::unique_ptr<EmbeddingTable> embedding,
                               const TextDataset& train, std::uint64_t seed,
                               std::size_t threads)
    : embedding_(std::move(embedding)), train_(train.examples), threads_(threads) {
  if (!embedding_) throw Error(ErrorCode::kInvalidArgument, "textclf: missing table");
  if (train.n_classes < 2) throw Error(ErrorCode::kInvalidArgument, "textclf: need 2+ classes");
  if (embedding_->size() < train.vocab_size) {
    throw Error(ErrorCode::kDimensionMismatch, "textclf: table smaller than vocabulary");
  }
  const std::size_t d = embedding_->dim();
  DenseMatrix w(train.n_classes, d);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& x : w.values()) x = scale * standard_normal(rng);
  w_ = DenseParameter(std::move(w));
  b_ = DenseParameter(DenseMatrix(1, train.n_classes));
}

TextClassifier::TextClassifier(std::unique_ptr<EmbeddingTable> embedding, DenseMatrix w,
                               std::vector<double> b)
    : embedding_(std::move(embedding)) {
  if (!embedding_ || w.cols() != embedding_->dim() || w.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "textclf: classifier shape mismatch");
  }
  const auto c = b.size();
  w_ = DenseParameter(std::move(w));
  b_ = DenseParameter(DenseMatrix(1, c, std::move(b)));
}

std::vector<double> TextClassifier::doc_embedding(std::span<const Index> tokens) const {
  const std::size_t d = embedding_->dim();
  std::vector<double> e(d, 0.0);
  if (tokens.empty()) return e;
  std::vector<double> row(d);
  for (Index t : tokens) {
    embedding_->embed_row(t, row);
    for (std::size_t c = 0; c < d; ++c) e[c] += row[c];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (double& x : e) x *= inv;
  return e;
}

std::vector<double> TextClassifier::probabilities(std::span<const Index> tokens) const {
  return textclf_predict(w_.value, b_.value.row(0), doc_embedding(tokens));
}

std::size_t TextClassifier::predict(std::span<const Index> tokens) const {
  return argmax(probabilities(tokens));
}

double TextClassifier::example_loss(const TextExample& ex) const {
  const auto p = probabilities(ex.tokens);
  return -std::log(std::max(p.at(ex.label), kProbabilityFloor));
}

BatchLoss TextClassifier::accumulate(std::span<const std::size_t> batch) {
  const std::size_t n = batch.size();
  const std::size_t d = embedding_->dim();
  const std::size_t c = n_classes();
  std::vector<std::vector<double>> emb(n);
  std::vector<std::vector<double>> grad_logits(n);
  std::vector<double> losses(n);
  parallel_for_each(n, threads_, [&](std::size_t j) {
    const auto& ex = train_.at(batch[j]);
    emb[j] = doc_embedding(ex.tokens);
    auto p = textclf_predict(w_.value, b_.value.row(0), emb[j]);
    losses[j] = -std::log(std::max(p[ex.label], kProbabilityFloor));
    p[ex.label] -= 1.0;
    grad_logits[j] = std::move(p);
  });
  BatchLoss loss;
  std::vector<double> ge(d);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& ex = train_[batch[j]];
    const auto& g = grad_logits[j];
    loss.data += losses[j];
    std::fill(ge.begin(), ge.end(), 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      auto gw = w_.grad.row(k);
      const auto wk = w_.value.row(k);
      for (std::size_t i = 0; i < d; ++i) {
        gw[i] += g[k] * emb[j][i];
        ge[i] += g[k] * wk[i];
      }
      b_.grad(0, k) += g[k];
    }
    if (ex.tokens.empty()) continue;
    const double inv = 1.0 / static_cast<double>(ex.tokens.size());
    for (double& x : ge) x *= inv;
    for (Index t : ex.tokens) embedding_->accumulate(t, ge);
  }
  loss.penalty = embedding_->add_penalties();
  return loss;
}

bool TextClassifier::gradients_finite() const {
  return w_.grad.all_finite() && b_.grad.all_finite() && embedding_->gradients_finite();
}

void TextClassifier::apply(const StepContext& ctx) {
  w_.apply(ctx);
  b_.apply(ctx);
  embedding_->apply(ctx);
  w_.zero_grad();
  b_.zero_grad();
}

void TextClassifier::discard() {
  w_.zero_grad();
  b_.zero_grad();
  embedding_->discard();
}

double TextClassifier::data_loss(std::span<const std::size_t> examples) const {
  std::vector<double> losses(examples.size());
  parallel_for_each(examples.size(), threads_,
                    [&](std::size_t j) { losses[j] = example_loss(train_.at(examples[j])); });
  double s = 0.0;
  for (double l : losses) s += l;
  return s;
}

double TextClassifier::total_loss(const TextDataset& data) const {
  std::vector<double> losses(data.examples.size());
  parallel_for_each(data.examples.size(), threads_,
                    [&](std::size_t j) { losses[j] = example_loss(data.examples[j]); });
  double s = 0.0;
  for (double l : losses) s += l;
  return s;
}

double TextClassifier::accuracy(const TextDataset& data) const {
  if (data.examples.empty()) throw Error(ErrorCode::kInvalidArgument, "accuracy: empty dataset");
  std::vector<double> pred(data.examples.size());
  std::vector<double> truth(data.examples.size());
  parallel_for_each(data.examples.size(), threads_, [&](std::size_t j) {
    pred[j] = static_cast<double>(predict(data.examples[j].tokens));
    truth[j] = static_cast<double>(data.examples[j].label);
  });
  return evaluate(pred, truth, Metric::kAccuracy);
}

}  // namespace ant
