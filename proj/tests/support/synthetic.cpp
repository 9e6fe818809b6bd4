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

#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "ant/random.hpp"

namespace ant::testing {

namespace {

std::vector<double> power_law_cdf(std::size_t n, double exponent) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i) + 10.0, exponent);
    cdf[i] = acc;
  }
  for (double& c : cdf) c /= acc;
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

RatingsDataset make_ratings(const RatingsSpec& spec) {
  Rng rng(spec.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rank));
  DenseMatrix u(spec.n_users, spec.rank);
  DenseMatrix v(spec.n_items, spec.rank);
  for (double& x : u.values()) x = scale * standard_normal(rng);
  for (double& x : v.values()) x = scale * standard_normal(rng);
  std::vector<double> ubias(spec.n_users);
  std::vector<double> ibias(spec.n_items);
  for (double& b : ubias) b = 0.4 * standard_normal(rng);
  for (double& b : ibias) b = 0.5 * standard_normal(rng);

  const auto ucdf = power_law_cdf(spec.n_users, spec.skew);
  const auto icdf = power_law_cdf(spec.n_items, spec.skew);
  std::unordered_set<std::uint64_t> seen;
  RatingsDataset data;
  data.triples.reserve(spec.n_ratings);
  // Every user and item appears at least once.
  auto emit = [&](std::size_t user, std::size_t item) {
    if (!seen.insert(static_cast<std::uint64_t>(user) * spec.n_items + item).second) return;
    const double raw = 3.6 + ubias[user] + ibias[item] + dot(u.row(user), v.row(item)) +
                       spec.noise * standard_normal(rng);
    data.triples.push_back({user, item, std::clamp(std::round(raw), 1.0, 5.0)});
  };
  for (std::size_t i = 0; i < std::max(spec.n_users, spec.n_items); ++i) {
    emit(i % spec.n_users, i % spec.n_items);
  }
  while (data.triples.size() < spec.n_ratings) emit(draw(ucdf, rng), draw(icdf, rng));

  data.n_users = spec.n_users;
  data.n_items = spec.n_items;
  for (std::size_t i = 0; i < spec.n_users; ++i) data.user_raw.push_back(static_cast<std::int64_t>(i + 1));
  for (std::size_t i = 0; i < spec.n_items; ++i) data.item_raw.push_back(static_cast<std::int64_t>(i + 1));
  double s = 0.0;
  for (const auto& r : data.triples) s += r.rating;
  data.global_mean = s / static_cast<double>(data.triples.size());
  return data;
}

void write_legacy_ratings(const RatingsDataset& data, const std::string& path) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < data.triples.size(); ++i) {
    const auto& r = data.triples[i];
    out << data.user_raw[r.user] << "::" << data.item_raw[r.item] << "::"
        << static_cast<int>(r.rating) << "::" << 978300000 + i << '\n';
  }
}

LabeledCorpus make_topic_corpus(const TopicSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t reserved = spec.n_classes * spec.topic_words;
  const std::size_t background = spec.vocab - reserved;
  const auto bcdf = power_law_cdf(background, 1.0);
  LabeledCorpus out;
  for (std::size_t n = 0; n < spec.n_docs; ++n) {
    const std::size_t label = uniform_index(rng, spec.n_classes);
    const std::size_t len = spec.min_len + uniform_index(rng, spec.max_len - spec.min_len + 1);
    Document doc;
    for (std::size_t t = 0; t < len; ++t) {
      std::size_t id;
      if (uniform01(rng) < spec.topic_rate) {
        id = label * spec.topic_words + uniform_index(rng, spec.topic_words);
      } else {
        id = reserved + draw(bcdf, rng);
      }
      doc.push_back("w" + std::to_string(id));
    }
    out.docs.push_back(std::move(doc));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace ant::testing
