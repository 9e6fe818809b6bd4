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

// Writes the synthetic rating log and topic corpus used by the tests, so the
// command-line tool can be exercised without external data.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic ratings and labeled documents"};
  std::string ratings_path;
  std::string corpus_path;
  ant::testing::RatingsSpec rs;
  ant::testing::TopicSpec ts;
  app.add_option("--ratings", ratings_path, "output file, user::item::rating::timestamp");
  app.add_option("--corpus", corpus_path, "output file, <label>\\t<tokens>");
  app.add_option("--n-ratings", rs.n_ratings);
  app.add_option("--n-docs", ts.n_docs);
  app.add_option("--seed", rs.seed);
  CLI11_PARSE(app, argc, argv);
  ts.seed = rs.seed;

  if (!ratings_path.empty()) {
    const auto data = ant::testing::make_ratings(rs);
    ant::testing::write_legacy_ratings(data, ratings_path);
    std::cout << "wrote " << data.triples.size() << " ratings to " << ratings_path << '\n';
  }
  if (!corpus_path.empty()) {
    const auto corpus = ant::testing::make_topic_corpus(ts);
    std::ofstream out(corpus_path);
    for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
      out << corpus.labels[i] << '\t';
      for (std::size_t t = 0; t < corpus.docs[i].size(); ++t) {
        out << (t ? " " : "") << corpus.docs[i][t];
      }
      out << '\n';
    }
    std::cout << "wrote " << corpus.docs.size() << " documents to " << corpus_path << '\n';
  }
  return 0;
}
