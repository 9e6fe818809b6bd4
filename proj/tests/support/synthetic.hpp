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

#ifndef ANT_TESTS_SYNTHETIC_HPP
#define ANT_TESTS_SYNTHETIC_HPP

#include <cstdint>
#include <string>

#include "ant/tasks.hpp"

namespace ant::testing {

struct RatingsSpec {
  std::size_t n_users = 6040;
  std::size_t n_items = 3706;
  std::size_t n_ratings = 1000209;
  std::size_t rank = 8;
  double noise = 0.8;     // stddev of the rating noise before rounding
  double skew = 0.9;      // power-law exponent of user and item popularity
  std::uint64_t seed = 1;
};

/// Low-rank-plus-noise ratings on the 1..5 integer scale, distinct
/// (user, item) pairs, popularity skewed like public rating logs.
RatingsDataset make_ratings(const RatingsSpec& spec);

/// Writes `data` as "user::item::rating::timestamp" lines.
void write_legacy_ratings(const RatingsDataset& data, const std::string& path);

struct TopicSpec {
  std::size_t n_docs = 5000;
  std::size_t vocab = 2000;
  std::size_t n_classes = 3;
  std::size_t topic_words = 20;  // words reserved for each class
  double topic_rate = 0.25;      // probability a token is a topic word
  std::size_t min_len = 15;
  std::size_t max_len = 30;
  std::uint64_t seed = 1;
};

/// Documents over tokens "w0".."w<vocab-1>". The label of a document is the
/// class whose topic words it draws from; other tokens follow a Zipf law over
/// the shared background words.
LabeledCorpus make_topic_corpus(const TopicSpec& spec);

}  // namespace ant::testing

#endif  // ANT_TESTS_SYNTHETIC_HPP
