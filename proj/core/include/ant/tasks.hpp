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

#ifndef ANT_TASKS_HPP
#define ANT_TASKS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ant/anchors.hpp"
#include "ant/model.hpp"
#include "ant/optim.hpp"

namespace ant {

// ---------------------------------------------------------------------------
// Ratings
// ---------------------------------------------------------------------------

struct Rating {
  Index user = 0;
  Index item = 0;
  double rating = 0.0;
};

struct RatingsDataset {
  std::vector<Rating> triples;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  /// Mean rating of the training split (of all triples before a split).
  double global_mean = 0.0;
  /// Raw id of each dense user / item index.
  std::vector<std::int64_t> user_raw;
  std::vector<std::int64_t> item_raw;
};

enum class RatingsFormat { kCsvHeader, kLegacyDoubleColon };

inline constexpr double kMinRating = 0.5;
inline constexpr double kMaxRating = 5.0;

/// "userId,movieId,rating,timestamp" after one header line, or
/// "user::movie::rating::timestamp". Raw ids are remapped to dense indices in
/// order of first appearance. Errors name the offending line.
RatingsDataset load_movielens(std::istream& in, RatingsFormat format);
RatingsDataset load_movielens_file(const std::string& path, RatingsFormat format);
/// Guesses the format from the first line of the file.
RatingsFormat detect_ratings_format(const std::string& path);

struct RatingsSplit {
  RatingsDataset train;
  RatingsDataset val;
  RatingsDataset test;
  std::size_t moved_to_train = 0;
};

/// Seeded uniform split. Validation and test examples whose user or item has
/// no training example are moved to train. All parts share the id maps and
/// carry the training mean.
RatingsSplit split(const RatingsDataset& data, std::array<double, 3> fractions,
                   std::uint64_t seed);

/// global_mean + u . v
double mf_predict(std::span<const double> user, std::span<const double> item,
                  double global_mean);

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

struct LabeledCorpus {
  Corpus docs;
  std::vector<std::size_t> labels;
};

/// Lines "<label>\t<space separated tokens>" with non-negative integer labels.
LabeledCorpus read_labeled_corpus(std::istream& in);

struct TextExample {
  std::vector<Index> tokens;
  std::size_t label = 0;
};

struct TextDataset {
  std::vector<TextExample> examples;
  std::size_t n_classes = 0;
  std::size_t vocab_size = 0;
  std::size_t unknown_tokens = 0;  // dropped during encoding
};

/// Maps tokens through `vocab`; tokens outside it are dropped and counted.
TextDataset encode(const LabeledCorpus& corpus, const Vocabulary& vocab,
                   std::size_t n_classes);

/// softmax(W e + b).
std::vector<double> textclf_predict(const DenseMatrix& w, std::span<const double> b,
                                    std::span<const double> e);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

enum class Metric { kMse, kAccuracy };

/// kMse: mean of (p - t)^2 without the 1/2 factor. kAccuracy: fraction of
/// exact matches.
double evaluate(std::span<const double> predictions, std::span<const double> targets,
                Metric metric);

// ---------------------------------------------------------------------------
// Harnesses
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for_each(std::size_t n, std::size_t threads,
                       const std::function<void(std::size_t)>& fn);

/// Rating regression with prediction global_mean + u . v and loss
/// 1/2 (y - y_hat)^2 per rating.
class MatrixFactorization final : public TaskHarness {
 public:
  MatrixFactorization(std::unique_ptr<EmbeddingTable> users,
                      std::unique_ptr<EmbeddingTable> items, const RatingsDataset& train,
                      std::size_t threads = 1);

  std::size_t num_examples() const override { return train_.size(); }
  BatchLoss accumulate(std::span<const std::size_t> batch) override;
  bool gradients_finite() const override;
  void apply(const StepContext& ctx) override;
  void discard() override;
  double data_loss(std::span<const std::size_t> examples) const override;
  std::vector<EmbeddingTable*> tables() override { return {users_.get(), items_.get()}; }
  std::vector<const EmbeddingTable*> tables() const override {
    return {users_.get(), items_.get()};
  }

  double predict(Index user, Index item) const;
  /// Unhalved mean squared error over `data`.
  double mse(const RatingsDataset& data) const;
  /// Sum of 1/2 squared errors over `data`.
  double half_sse(const RatingsDataset& data) const;

  double global_mean() const noexcept { return global_mean_; }
  EmbeddingTable& users() { return *users_; }
  EmbeddingTable& items() { return *items_; }
  const EmbeddingTable& users() const { return *users_; }
  const EmbeddingTable& items() const { return *items_; }

 private:
  std::vector<double> squared_errors(std::span<const Rating> triples) const;

  std::unique_ptr<EmbeddingTable> users_;
  std::unique_ptr<EmbeddingTable> items_;
  std::vector<Rating> train_;
  double global_mean_;
  std::size_t threads_;
  std::vector<double> u_buf_, v_buf_, r_buf_;
};

/// Mean-of-embeddings document vector followed by a linear softmax layer,
/// trained with cross-entropy. Documents with no known token embed to zero.
class TextClassifier final : public TaskHarness {
 public:
  TextClassifier(std::unique_ptr<EmbeddingTable> embedding, const TextDataset& train,
                 std::uint64_t seed, std::size_t threads = 1);
  /// Restores a trained classifier (W is n_classes x d, b has n_classes).
  TextClassifier(std::unique_ptr<EmbeddingTable> embedding, DenseMatrix w,
                 std::vector<double> b);

  std::size_t num_examples() const override { return train_.size(); }
  BatchLoss accumulate(std::span<const std::size_t> batch) override;
  bool gradients_finite() const override;
  void apply(const StepContext& ctx) override;
  void discard() override;
  double data_loss(std::span<const std::size_t> examples) const override;
  std::vector<EmbeddingTable*> tables() override { return {embedding_.get()}; }
  std::vector<const EmbeddingTable*> tables() const override { return {embedding_.get()}; }

  std::vector<double> doc_embedding(std::span<const Index> tokens) const;
  std::vector<double> probabilities(std::span<const Index> tokens) const;
  std::size_t predict(std::span<const Index> tokens) const;
  double accuracy(const TextDataset& data) const;
  /// Summed cross-entropy over `data`.
  double total_loss(const TextDataset& data) const;

  std::size_t n_classes() const noexcept { return w_.value.rows(); }
  const DenseParameter& weights() const noexcept { return w_; }
  const DenseParameter& bias() const noexcept { return b_; }
  EmbeddingTable& embedding() { return *embedding_; }
  const EmbeddingTable& embedding() const { return *embedding_; }

 private:
  double example_loss(const TextExample& ex) const;

  std::unique_ptr<EmbeddingTable> embedding_;
  std::vector<TextExample> train_;
  DenseParameter w_;
  DenseParameter b_;
  std::size_t threads_ = 1;
};

}  // namespace ant

#endif  // ANT_TASKS_HPP
