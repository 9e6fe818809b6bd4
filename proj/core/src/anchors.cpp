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

#include "ant/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "ant/random.hpp"

namespace ant {

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    Document doc;
    for (std::string w; words >> w;) doc.push_back(std::move(w));
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> freq)
    : tokens_(std::move(tokens)), freq_(std::move(freq)) {
  if (tokens_.size() != freq_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vocabulary: token/count mismatch");
  }
  ids_.reserve(tokens_.size());
  for (Index i = 0; i < tokens_.size(); ++i) {
    if (freq_[i] == 0) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary: zero count for " + tokens_[i]);
    }
    if (!ids_.emplace(tokens_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary: duplicate token " + tokens_[i]);
    }
  }
}

std::optional<Index> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Index Vocabulary::id(std::string_view token) const {
  auto found = find(token);
  if (!found) {
    throw Error(ErrorCode::kOutOfRange, "token not in vocabulary: " + std::string(token));
  }
  return *found;
}

Vocabulary build_vocab(const Corpus& corpus) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::string> order;
  std::vector<std::size_t> counts;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc) {
      auto [it, fresh] = slot.emplace(tok, order.size());
      if (fresh) {
        order.push_back(tok);
        counts.push_back(0);
      }
      ++counts[it->second];
    }
  }
  if (order.empty()) throw Error(ErrorCode::kInvalidArgument, "build_vocab: empty corpus");

  std::vector<std::size_t> perm(order.size());
  std::iota(perm.begin(), perm.end(), 0);
  // Stable sort keeps first-occurrence order among equal counts.
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  std::vector<std::string> tokens;
  std::vector<std::size_t> freq;
  tokens.reserve(perm.size());
  freq.reserve(perm.size());
  for (auto p : perm) {
    tokens.push_back(std::move(order[p]));
    freq.push_back(counts[p]);
  }
  return Vocabulary(std::move(tokens), std::move(freq));
}

std::size_t CooccurrenceMatrix::count(Index i, Index j) const {
  if (i == j) return 0;
  auto it = counts_.find(std::minmax(i, j));
  return it == counts_.end() ? 0 : it->second;
}

void CooccurrenceMatrix::add(Index i, Index j, std::size_t n) {
  if (i >= dim_ || j >= dim_) throw Error(ErrorCode::kOutOfRange, "cooccurrence index");
  if (i == j || n == 0) return;
  counts_[std::minmax(i, j)] += n;
}

DenseMatrix CooccurrenceMatrix::to_features() const {
  DenseMatrix f(dim_, dim_);
  for (const auto& [key, n] : counts_) {
    f(key.first, key.second) = static_cast<double>(n);
    f(key.second, key.first) = static_cast<double>(n);
  }
  for (Index r = 0; r < dim_; ++r) {
    auto row = f.row(r);
    const double norm = std::sqrt(dot(row, row));
    if (norm > 0.0) {
      for (double& x : row) x /= norm;
    }
  }
  return f;
}

CooccurrenceMatrix build_cooccurrence(const Corpus& corpus, const Vocabulary& vocab,
                                      std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kInvalidArgument, "cooccurrence window must be >= 1");
  CooccurrenceMatrix m(vocab.size(), window);
  std::vector<Index> ids;
  for (const auto& doc : corpus) {
    ids.clear();
    for (const auto& tok : doc) ids.push_back(vocab.id(tok));
    for (std::size_t p = 0; p < ids.size(); ++p) {
      const std::size_t end = std::min(ids.size(), p + window + 1);
      for (std::size_t q = p + 1; q < end; ++q) m.add(ids[p], ids[q]);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Anchor selection
// ---------------------------------------------------------------------------

AnchorStrategy parse_anchor_strategy(std::string_view name) {
  if (name == "frequency") return AnchorStrategy::kFrequency;
  if (name == "tfidf") return AnchorStrategy::kTfidf;
  if (name == "kmeanspp") return AnchorStrategy::kKmeansPP;
  if (name == "random") return AnchorStrategy::kRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown anchor strategy: " + std::string(name));
}

const char* to_string(AnchorStrategy s) {
  switch (s) {
    case AnchorStrategy::kFrequency: return "frequency";
    case AnchorStrategy::kTfidf: return "tfidf";
    case AnchorStrategy::kKmeansPP: return "kmeanspp";
    case AnchorStrategy::kRandom: return "random";
  }
  return "unknown";
}

std::vector<double> tfidf_scores(const Corpus& docs, const Vocabulary& vocab) {
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "tfidf: no documents");
  std::vector<std::size_t> df(vocab.size(), 0);
  std::vector<std::unordered_map<Index, std::size_t>> tf(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d]) ++tf[d][vocab.id(tok)];
    for (const auto& [id, n] : tf[d]) ++df[id];
  }
  const auto n_docs = static_cast<double>(docs.size());
  std::vector<double> score(vocab.size(), 0.0);
  for (const auto& counts : tf) {
    for (const auto& [id, n] : counts) {
      const double idf = std::log(n_docs / static_cast<double>(df[id]));
      score[id] = std::max(score[id], static_cast<double>(n) * idf);
    }
  }
  return score;
}

std::vector<Index> kmeanspp_seed(const DenseMatrix& features, std::size_t k,
                                 std::uint64_t seed, std::span<const Index> exclude) {
  const std::size_t n = features.rows();
  std::vector<char> blocked(n, 0);
  for (Index e : exclude) {
    if (e < n) blocked[e] = 1;
  }
  std::vector<Index> candidates;
  for (Index i = 0; i < n; ++i) {
    if (!blocked[i]) candidates.push_back(i);
  }
  if (k > candidates.size()) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans++: k exceeds available candidates");
  }
  std::vector<Index> chosen;
  if (k == 0) return chosen;

  Rng rng(seed);
  chosen.push_back(candidates[uniform_index(rng, candidates.size())]);
  blocked[chosen.back()] = 1;

  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto center = features.row(chosen.back());
    double total = 0.0;
    for (Index i : candidates) {
      if (blocked[i]) continue;
      const auto x = features.row(i);
      double d2 = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) {
        const double diff = x[c] - center[c];
        d2 += diff * diff;
      }
      dist2[i] = std::min(dist2[i], d2);
      total += dist2[i];
    }
    Index pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Index i : candidates) {
        if (blocked[i]) continue;
        acc += dist2[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      // Every remaining point coincides with a center: fall back to uniform.
      std::vector<Index> rest;
      for (Index i : candidates) {
        if (!blocked[i]) rest.push_back(i);
      }
      pick = rest[uniform_index(rng, rest.size())];
    }
    chosen.push_back(pick);
    blocked[pick] = 1;
  }
  return chosen;
}

std::vector<Index> select_anchors(const AnchorPlan& plan, const Vocabulary& vocab,
                                  const AnchorInputs& inputs) {
  if (plan.k > vocab.size()) {
    throw Error(ErrorCode::kInvalidArgument, "select_anchors: k exceeds vocabulary size");
  }
  std::unordered_set<Index> excluded(inputs.exclude.begin(), inputs.exclude.end());
  auto take_ranked = [&](const std::vector<Index>& ranked) {
    std::vector<Index> out;
    for (Index id : ranked) {
      if (out.size() == plan.k) break;
      if (!excluded.contains(id)) out.push_back(id);
    }
    if (out.size() < plan.k) {
      throw Error(ErrorCode::kInvalidArgument, "select_anchors: not enough candidates");
    }
    return out;
  };

  switch (plan.strategy) {
    case AnchorStrategy::kRandom:
      return {};
    case AnchorStrategy::kFrequency: {
      std::vector<Index> ranked(vocab.size());
      std::iota(ranked.begin(), ranked.end(), 0);
      return take_ranked(ranked);
    }
    case AnchorStrategy::kTfidf: {
      if (inputs.docs == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "tfidf anchors need documents");
      }
      const auto score = tfidf_scores(*inputs.docs, vocab);
      std::vector<Index> ranked(vocab.size());
      std::iota(ranked.begin(), ranked.end(), 0);
      std::stable_sort(ranked.begin(), ranked.end(),
                       [&](Index a, Index b) { return score[a] > score[b]; });
      return take_ranked(ranked);
    }
    case AnchorStrategy::kKmeansPP: {
      if (inputs.features == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "kmeans++ anchors need features");
      }
      if (inputs.features->rows() != vocab.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "kmeans++: one feature row per object");
      }
      return kmeanspp_seed(*inputs.features, plan.k, plan.seed, inputs.exclude);
    }
  }
  return {};
}

std::vector<Index> select_anchors_chained(std::span<const AnchorPlan> plans,
                                          const Vocabulary& vocab,
                                          const AnchorInputs& inputs) {
  std::vector<Index> all(inputs.exclude.begin(), inputs.exclude.end());
  const std::size_t prefix = all.size();
  for (const auto& plan : plans) {
    AnchorInputs step = inputs;
    step.exclude = all;
    auto got = select_anchors(plan, vocab, step);
    all.insert(all.end(), got.begin(), got.end());
  }
  return {all.begin() + static_cast<std::ptrdiff_t>(prefix), all.end()};
}

PretrainedEmbeddings read_pretrained(std::istream& in, const Vocabulary& vocab) {
  PretrainedEmbeddings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> vec;
    for (double x; fields >> x;) vec.push_back(x);
    if (!fields.eof()) {
      throw Error(ErrorCode::kParse, "pretrained vectors: bad number on line " +
                                         std::to_string(line_no));
    }
    if (out.dim == 0) out.dim = vec.size();
    if (vec.size() != out.dim) {
      throw Error(ErrorCode::kParse, "pretrained vectors: inconsistent width on line " +
                                         std::to_string(line_no));
    }
    if (auto id = vocab.find(token)) out.vectors[*id] = std::move(vec);
  }
  return out;
}

DenseMatrix init_anchor_matrix(const AnchorPlan& plan, std::size_t d,
                               const PretrainedEmbeddings* pretrained) {
  if (plan.k == 0 || d == 0) {
    throw Error(ErrorCode::kInvalidArgument, "init_anchor_matrix: k and d must be >= 1");
  }
  const bool object_based = plan.strategy != AnchorStrategy::kRandom;
  if (object_based && plan.anchor_ids.size() != plan.k) {
    throw Error(ErrorCode::kInvalidArgument, "init_anchor_matrix: anchor_ids size != k");
  }
  DenseMatrix a(plan.k, d);
  if (object_based && pretrained != nullptr) {
    if (pretrained->dim != d) {
      throw Error(ErrorCode::kDimensionMismatch, "pretrained width != d");
    }
    for (std::size_t r = 0; r < plan.k; ++r) {
      auto it = pretrained->vectors.find(plan.anchor_ids[r]);
      if (it == pretrained->vectors.end()) {
        throw Error(ErrorCode::kOutOfRange, "anchor id " + std::to_string(plan.anchor_ids[r]) +
                                                " missing from pretrained vectors");
      }
      std::copy(it->second.begin(), it->second.end(), a.row(r).begin());
    }
    return a;
  }
  Rng rng(plan.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& x : a.values()) x = scale * standard_normal(rng);
  return a;
}

// ---------------------------------------------------------------------------
// Domain knowledge
// ---------------------------------------------------------------------------

void RelationGraph::add_positive(Index u, Index v) {
  if (u == v) throw Error(ErrorCode::kInvalidArgument, "relation: self pair");
  if (negative_.contains({u, v})) {
    throw Error(ErrorCode::kInvalidArgument, "relation: pair is already negative");
  }
  positive_.emplace(u, v);
}

void RelationGraph::add_negative(Index u, Index v) {
  if (u == v) throw Error(ErrorCode::kInvalidArgument, "relation: self pair");
  if (positive_.contains({u, v})) {
    throw Error(ErrorCode::kInvalidArgument, "relation: pair is already positive");
  }
  negative_.emplace(u, v);
}

RelationLoad read_relations(std::istream& in, const Vocabulary& vocab) {
  RelationLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string kind, u, v, extra;
    if (!(fields >> kind)) continue;
    if (!(fields >> u >> v) || (fields >> extra) || (kind != "P" && kind != "N")) {
      throw Error(ErrorCode::kParse, "relations: malformed line " + std::to_string(line_no));
    }
    const auto iu = vocab.find(u);
    const auto iv = vocab.find(v);
    if (!iu || !iv) {
      ++out.skipped;
      continue;
    }
    if (kind == "P") {
      out.graph.add_positive(*iu, *iv);
    } else {
      out.graph.add_negative(*iu, *iv);
    }
  }
  return out;
}

DomainMask build_domain_mask(const RelationGraph& relations, std::size_t vocab_size,
                             std::size_t k, std::span<const Index> anchor_ids) {
  if (anchor_ids.size() != k) {
    throw Error(ErrorCode::kInvalidArgument,
                "domain mask needs object-based anchors (one id per anchor)");
  }
  std::unordered_map<Index, Index> column_of;
  for (Index c = 0; c < anchor_ids.size(); ++c) column_of.emplace(anchor_ids[c], c);

  auto mask = std::make_shared<SparseRowMatrix>(vocab_size, k, true);
  DomainMask out;
  for (const auto& [u, a] : relations.positive()) {
    auto it = column_of.find(a);
    if (u >= vocab_size || it == column_of.end()) {
      ++out.skipped;
      continue;
    }
    mask->set(u, it->second, 1.0);
  }
  out.complement = std::move(mask);
  return out;
}

}  // namespace ant
