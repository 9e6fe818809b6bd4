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

#ifndef ANT_ANCHORS_HPP
#define ANT_ANCHORS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ant/dense_matrix.hpp"
#include "ant/sparse_matrix.hpp"

namespace ant {

using Document = std::vector<std::string>;
using Corpus = std::vector<Document>;

/// One document per line, whitespace-separated tokens. Blank lines are
/// kept as empty documents so line numbers stay meaningful.
Corpus read_corpus(std::istream& in);

// ---------------------------------------------------------------------------
// Vocabulary and co-occurrence statistics
// ---------------------------------------------------------------------------

/// Token <-> dense id map. Ids are assigned by descending frequency with
/// ties broken by first occurrence, so id order is also frequency order.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Takes tokens already in id order with their counts (all >= 1).
  Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> freq);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(Index id) const { return tokens_.at(id); }
  std::size_t freq(Index id) const { return freq_.at(id); }
  std::span<const std::string> tokens() const noexcept { return tokens_; }
  std::span<const std::size_t> freqs() const noexcept { return freq_; }

  std::optional<Index> find(std::string_view token) const;
  /// Throws kOutOfRange for unknown tokens.
  Index id(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> freq_;
  std::unordered_map<std::string, Index> ids_;
};

Vocabulary build_vocab(const Corpus& corpus);

/// Symmetric pair counts: count(i, j) is the number of position pairs at
/// distance <= window holding tokens i and j. The diagonal is never stored.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix(std::size_t dim, std::size_t window) : dim_(dim), window_(window) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t window() const noexcept { return window_; }
  std::size_t count(Index i, Index j) const;
  std::size_t stored_pairs() const noexcept { return counts_.size(); }
  /// Unordered pairs with i < j.
  const std::map<std::pair<Index, Index>, std::size_t>& pairs() const noexcept {
    return counts_;
  }

  void add(Index i, Index j, std::size_t n = 1);

  /// Dense |V| x |V| rows, row-normalized to unit length, for clustering.
  DenseMatrix to_features() const;

 private:
  std::size_t dim_;
  std::size_t window_;
  std::map<std::pair<Index, Index>, std::size_t> counts_;
};

CooccurrenceMatrix build_cooccurrence(const Corpus& corpus, const Vocabulary& vocab,
                                      std::size_t window);

// ---------------------------------------------------------------------------
// Anchor selection
// ---------------------------------------------------------------------------

enum class AnchorStrategy { kFrequency, kTfidf, kKmeansPP, kRandom };

AnchorStrategy parse_anchor_strategy(std::string_view name);
const char* to_string(AnchorStrategy s);

struct AnchorPlan {
  AnchorStrategy strategy = AnchorStrategy::kRandom;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  /// Selected object ids, one per anchor row. Empty for random bases.
  std::vector<Index> anchor_ids;
};

/// Inputs some strategies need. kTfidf needs docs, kKmeansPP needs features
/// (one row per vocabulary entry).
struct AnchorInputs {
  const DenseMatrix* features = nullptr;
  const Corpus* docs = nullptr;
  /// Ids that may not be selected (used when plans are chained).
  std::span<const Index> exclude = {};
};

/// Returns k distinct ids (empty for kRandom).
std::vector<Index> select_anchors(const AnchorPlan& plan, const Vocabulary& vocab,
                                  const AnchorInputs& inputs = {});

/// Runs each plan in turn, later plans skipping ids chosen by earlier ones.
std::vector<Index> select_anchors_chained(std::span<const AnchorPlan> plans,
                                          const Vocabulary& vocab,
                                          const AnchorInputs& inputs = {});

/// TF-IDF ranking score per token: max over documents of
/// count(token, doc) * ln(N_docs / df(token)).
std::vector<double> tfidf_scores(const Corpus& docs, const Vocabulary& vocab);

/// k-means++ seeding over the rows of `features` (D^2 sampling, no Lloyd
/// iterations). Candidates listed in `exclude` are never picked.
std::vector<Index> kmeanspp_seed(const DenseMatrix& features, std::size_t k,
                                 std::uint64_t seed, std::span<const Index> exclude = {});

/// Pretrained vectors keyed by vocabulary id.
struct PretrainedEmbeddings {
  std::size_t dim = 0;
  std::unordered_map<Index, std::vector<double>> vectors;
};

/// Reads "<token> v1 ... vd" lines; tokens missing from `vocab` are skipped.
PretrainedEmbeddings read_pretrained(std::istream& in, const Vocabulary& vocab);

/// K x d anchor matrix. Random bases draw N(0, 1/d) entries; object-based
/// plans copy pretrained rows for plan.anchor_ids when a source is given and
/// otherwise fall back to the same Gaussian.
DenseMatrix init_anchor_matrix(const AnchorPlan& plan, std::size_t d,
                               const PretrainedEmbeddings* pretrained = nullptr);

// ---------------------------------------------------------------------------
// Domain knowledge
// ---------------------------------------------------------------------------

/// Related (positive) and unrelated (negative) object pairs.
class RelationGraph {
 public:
  void add_positive(Index u, Index v);
  void add_negative(Index u, Index v);

  const std::set<std::pair<Index, Index>>& positive() const noexcept { return positive_; }
  const std::set<std::pair<Index, Index>>& negative() const noexcept { return negative_; }
  std::vector<std::pair<Index, Index>> negative_list() const {
    return {negative_.begin(), negative_.end()};
  }

 private:
  std::set<std::pair<Index, Index>> positive_;
  std::set<std::pair<Index, Index>> negative_;
};

struct RelationLoad {
  RelationGraph graph;
  std::size_t skipped = 0;  // lines naming tokens outside the vocabulary
};

/// Lines "P u v" or "N u v" with token strings; '#' starts a comment.
RelationLoad read_relations(std::istream& in, const Vocabulary& vocab);

struct DomainMask {
  /// 1 at (u, column of anchor a) for every positive pair (u, a).
  std::shared_ptr<const SparseRowMatrix> complement;
  std::size_t skipped = 0;  // positive pairs whose second endpoint is no anchor
};

/// Positive pairs are directed (object, anchor object).
DomainMask build_domain_mask(const RelationGraph& relations, std::size_t vocab_size,
                             std::size_t k, std::span<const Index> anchor_ids);

}  // namespace ant

#endif  // ANT_ANCHORS_HPP
