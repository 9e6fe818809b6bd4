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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ant/persist.hpp"
#include "config.hpp"
#include "runner.hpp"
#include "synthetic.hpp"

namespace ant::app {
namespace {

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.task = "textclf";
  c.anchors = 12;
  c.lambda2 = 0.03;
  c.nbant = true;
  c.transform_grad = "full_row";
  const nlohmann::json j = c;
  const RunConfig back = j.get<RunConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(back.anchors, 12u);
  EXPECT_EQ(back.transform_grad, "full_row");
}

TEST(RunConfig, UnknownKeyRejected) {
  const nlohmann::json j = {{"anchors", 3}, {"anchros", 4}};
  EXPECT_THROW(j.get<RunConfig>(), std::exception);
}

TEST(RunConfig, Validation) {
  RunConfig c;
  c.validate();
  c.anchor_init = "kmeans";
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.train_fraction = 0.9;
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.transform_grad = "sometimes";
  EXPECT_THROW(c.validate(), Error);
}

TEST(RunConfig, LoadFromFile) {
  const auto path = (std::filesystem::temp_directory_path() / "ant_cfg_test.json").string();
  std::ofstream(path) << R"({"task": "recsys", "dim": 8, "epochs": 2})";
  const RunConfig c = load_config(path);
  EXPECT_EQ(c.dim, 8u);
  EXPECT_EQ(c.epochs, 2u);
  std::filesystem::remove(path);
}

testing::RatingsSpec small_spec() {
  testing::RatingsSpec s;
  s.n_users = 60;
  s.n_items = 40;
  s.n_ratings = 1500;
  s.rank = 2;
  return s;
}

TEST(RunRecsys, SavesReloadableModels) {
  const RatingsDataset data = testing::make_ratings(small_spec());
  RunConfig c;
  c.dim = 4;
  c.anchors = 3;
  c.epochs = 3;
  c.lambda2 = 1e-3;
  c.out = (std::filesystem::temp_directory_path() / "ant_recsys_test").string();
  std::ostringstream log;
  const RecsysResult r = run_recsys(c, data, &log);
  EXPECT_EQ(r.epochs.size(), 3u);
  EXPECT_TRUE(std::isfinite(r.test_mse));
  EXPECT_NE(log.str().find("epoch=1 train_loss="), std::string::npos);
  const AntModel users = load_model(c.out + "/users.antb");
  EXPECT_EQ(count_params(users), r.users);
  std::ifstream meta(c.out + "/meta.json");
  const auto j = nlohmann::json::parse(meta);
  EXPECT_EQ(j.at("config").at("anchors"), 3);
  std::filesystem::remove_all(c.out);
}

TEST(RunRecsys, DenseBaselineCountsFullTable) {
  const RatingsDataset data = testing::make_ratings(small_spec());
  RunConfig c;
  c.dim = 4;
  c.dense = true;
  c.epochs = 1;
  const RecsysResult r = run_recsys(c, data, nullptr);
  EXPECT_EQ(r.total_params, (data.n_users + data.n_items) * 4);
}

TEST(RunRecsys, SameSeedSameResult) {
  const RatingsDataset data = testing::make_ratings(small_spec());
  RunConfig c;
  c.dim = 4;
  c.anchors = 3;
  c.epochs = 2;
  c.nbant = true;
  EXPECT_EQ(run_recsys(c, data, nullptr).test_mse, run_recsys(c, data, nullptr).test_mse);
}

TEST(RunTextclf, TrainsOnTopics) {
  testing::TopicSpec s;
  s.n_docs = 300;
  s.vocab = 200;
  const LabeledCorpus all = testing::make_topic_corpus(s);
  LabeledCorpus train, val, test;
  for (std::size_t i = 0; i < all.docs.size(); ++i) {
    LabeledCorpus& part = i % 10 == 0 ? val : (i % 10 == 1 ? test : train);
    part.docs.push_back(all.docs[i]);
    part.labels.push_back(all.labels[i]);
  }
  RunConfig c;
  c.task = "textclf";
  c.dim = 8;
  c.anchors = 4;
  c.epochs = 3;
  const TextclfResult r = run_textclf(c, train, val, test, nullptr);
  EXPECT_EQ(r.epochs.size(), 3u);
  EXPECT_GE(r.test_accuracy, 0.0);
  EXPECT_LE(r.test_accuracy, 1.0);
  EXPECT_EQ(r.params.anchor, 4u * 8u);
}

TEST(FormatEpoch, LineShape) {
  EpochLog e{3, 0.5, 0.25, 100, 20, 12.5, false};
  EXPECT_EQ(format_epoch(e, "val_mse"),
            "epoch=3 train_loss=0.500000 val_mse=0.250000 nnz=100 K=20 sva_obj=12.500000");
}

}  // namespace
}  // namespace ant::app
