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

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "ant/ibp.hpp"
#include "ant/nbant.hpp"
#include "ant/random.hpp"
#include "ant/tasks.hpp"

namespace ant {
namespace {

// Direct evaluation of the two-parameter IBP closed form with lgamma.
double ibp_oracle(const DenseMatrix& z, double a, double b) {
  const std::size_t n = z.rows();
  double h = 0.0;
  for (std::size_t j = 1; j <= n; ++j) h += 1.0 / (b + static_cast<double>(j) - 1.0);
  std::map<std::vector<double>, int> patterns;
  double out = -a * b * h;
  for (Index k = 0; k < z.cols(); ++k) {
    std::vector<double> col(n);
    double m = 0.0;
    for (Index i = 0; i < n; ++i) m += (col[i] = z(i, k));
    if (m == 0.0) continue;
    ++patterns[col];
    out += std::log(a * b) + std::lgamma(m) + std::lgamma(n - m + b) - std::lgamma(n + b);
  }
  for (const auto& [col, count] : patterns) out -= std::lgamma(count + 1.0);
  return out;
}

DenseMatrix random_binary(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix z(rows, cols);
  for (double& x : z.values()) x = uniform01(rng) < 0.4 ? 1.0 : 0.0;
  return z;
}

TEST(IbpPrior, HandValues) {
  EXPECT_NEAR(log_ibp_prior({DenseMatrix(2, 3), 1.0, 1.0}), -1.5, 1e-12);
  EXPECT_NEAR(log_ibp_prior({DenseMatrix(1, 1, 1.0), 1.0, 1.0}), -1.0, 1e-12);
  EXPECT_NEAR(log_ibp_prior({DenseMatrix(1, 1, 1.0), 2.0, 1.0}), std::log(2.0) - 2.0, 1e-12);
}

TEST(IbpPrior, MatchesOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix z = random_binary(1 + uniform_index(rng, 6), 1 + uniform_index(rng, 5), rng);
    const double a = 0.1 + 3.0 * uniform01(rng);
    const double b = 0.1 + 3.0 * uniform01(rng);
    const double want = ibp_oracle(z, a, b);
    EXPECT_NEAR(log_ibp_prior({z, a, b}), want, 1e-9 * std::max(1.0, std::abs(want)));
    EXPECT_NEAR(log_ibp_prior_log_params(z, std::log(a), std::log(b)), want,
                1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(IbpPrior, RejectsBadInput) {
  EXPECT_THROW(log_ibp_prior({DenseMatrix(1, 1, 0.5), 1.0, 1.0}), Error);
  EXPECT_THROW(log_ibp_prior({DenseMatrix(1, 1), 0.0, 1.0}), Error);
}

TEST(BinaryStats, CountsColumnsAndOnes) {
  const auto z = DenseMatrix::from_rows({{1, 0, 0}, {1, 0, 1}});
  const BinaryStats s = binary_stats(z);
  EXPECT_EQ(s.k, 2u);
  EXPECT_EQ(s.ones, 3u);
}

TEST(SvaLimit, EmptyZ) {
  const DenseMatrix z(3, 2);
  EXPECT_EQ(sva_limit(z, 0.1, 0.01), 0.0);
  const std::vector<double> betas{1e4};
  EXPECT_LT(sva_limit_check(z, 0.1, 0.01, betas)[0].error, 1e-3);
}

TEST(SvaLimit, FullColumn) {
  const DenseMatrix z(4, 1, 1.0);
  EXPECT_NEAR(sva_limit(z, 0.1, 0.01), -0.01 * 4 - 0.09, 1e-15);
}

TEST(SvaLimit, ErrorShrinksWithBeta) {
  Rng rng(10);
  const std::vector<double> betas{10, 100, 1000, 10000};
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix z = random_binary(1 + uniform_index(rng, 8), 4, rng);
    const auto pts = sva_limit_check(z, 0.05, 0.01, betas);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      // Once the gap falls below one ulp of the limit it reads as exactly 0.
      if (pts[i - 1].error > 0.0) {
        EXPECT_LT(pts[i].error, pts[i - 1].error);
      } else {
        EXPECT_EQ(pts[i].error, 0.0);
      }
    }
  }
  EXPECT_THROW(sva_limit_check(DenseMatrix(1, 1), 0.01, 0.01, betas), Error);
}

TEST(SvaObjective, Arithmetic) {
  EXPECT_EQ(sva_objective(0.0, 0, 0, {}), 0.0);
  EXPECT_NEAR(sva_objective(2.0, 100, 10, {0.1, 1e-4}), 3.009, 1e-12);
  EXPECT_NEAR(sva_objective(2.0, 100, 10, {1e-4, 1e-4}), 2.01, 1e-12);
}

TEST(Trend, Rule) {
  const std::vector<double> down{10, 9}, up{8, 9}, flat{9, 9.0000001}, one{3};
  EXPECT_EQ(trend(down, 1e-4), Trend::kDecreasing);
  EXPECT_EQ(trend(up, 1e-4), Trend::kIncreasing);
  EXPECT_EQ(trend(flat, 1e-4), Trend::kFlat);
  EXPECT_EQ(trend(one, 1e-4), Trend::kFlat);
}

std::unique_ptr<AntEmbedding> small_table(std::size_t k, std::uint64_t seed) {
  AnchorPlan plan{AnchorStrategy::kRandom, k, seed, {}};
  Regularization reg;
  reg.lambda2 = 1e-3;
  return std::make_unique<AntEmbedding>(make_ant_model(12, plan, 3, reg, seed));
}

TEST(NbAnt, DecreasingGrows) {
  auto t = small_table(10, 1);
  NbAntController c(10, 1);
  AntEmbedding* tables[] = {t.get()};
  EXPECT_EQ(c.adapt(tables, 10.0).action, AdaptAction::kKeep);
  const AdaptReport r = c.adapt(tables, 9.0);
  EXPECT_EQ(r.action, AdaptAction::kGrow);
  EXPECT_EQ(r.k_after, 11u);
  EXPECT_EQ(t->model().anchors.rows(), 11u);
  EXPECT_EQ(t->model().transform.cols(), 11u);
}

TEST(NbAnt, ShrinkThenGrowRestores) {
  auto u = small_table(4, 1);
  auto v = small_table(4, 2);
  const AntModel u0 = u->model();
  const AntModel v0 = v->model();
  NbAntController c(4, 1);
  AntEmbedding* tables[] = {u.get(), v.get()};
  c.adapt(tables, 8.0);
  EXPECT_EQ(c.adapt(tables, 9.0).action, AdaptAction::kShrink);
  EXPECT_EQ(u->num_anchors(), 3u);
  EXPECT_EQ(c.adapt(tables, 8.5).action, AdaptAction::kGrow);
  EXPECT_EQ(u->model().anchors, u0.anchors);
  EXPECT_EQ(u->model().transform, u0.transform);
  EXPECT_EQ(v->model().anchors, v0.anchors);
  EXPECT_EQ(v->model().transform, v0.transform);
}

TEST(NbAnt, FlatLeavesModelIdentical) {
  auto t = small_table(3, 5);
  const AntModel before = t->model();
  NbAntController c(3, 1);
  AntEmbedding* tables[] = {t.get()};
  c.adapt(tables, 5.0);
  c.adapt(tables, 5.0);
  EXPECT_EQ(t->model().anchors, before.anchors);
  EXPECT_EQ(t->model().transform, before.transform);
}

TEST(NbAnt, NeverBelowOneAnchor) {
  auto t = small_table(1, 5);
  NbAntController c(1, 2);
  AntEmbedding* tables[] = {t.get()};
  c.adapt(tables, 1.0);
  EXPECT_EQ(c.adapt(tables, 2.0).k_after, 1u);
}

TEST(NbAnt, MismatchedTableThrows) {
  auto t = small_table(3, 5);
  NbAntController c(4, 1);
  AntEmbedding* tables[] = {t.get()};
  EXPECT_THROW(c.adapt(tables, 1.0), Error);
}

RatingsDataset ratings(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  RatingsDataset d;
  d.n_users = 12;
  d.n_items = 12;
  for (std::size_t i = 0; i < n; ++i) {
    const Index u = uniform_index(rng, 12), it = uniform_index(rng, 12);
    d.triples.push_back({u, it, 1.0 + static_cast<double>((u + it) % 5)});
  }
  d.global_mean = 3.0;
  return d;
}

TEST(OnlineTrain, RecordsOneKPerBatch) {
  const RatingsDataset d = ratings(120, 3);
  MatrixFactorization mf(small_table(4, 1), small_table(4, 2), d);
  NbAntController c(4, 1);
  std::vector<std::vector<std::size_t>> stream(3);
  for (std::size_t i = 0; i < 120; ++i) stream[i / 40].push_back(i);
  StepClock clock;
  OnlineConfig cfg;
  cfg.batch_size = 8;
  cfg.max_passes = 5;
  const OnlineReport r = online_train(mf, c, stream, clock, cfg);
  EXPECT_EQ(r.k_trajectory.size(), 3u);
  EXPECT_EQ(r.passes.size(), 3u);
  EXPECT_TRUE(std::isfinite(r.final_loss));
  EXPECT_EQ(r.k_trajectory.back(), c.k());
}

// One stream batch equals training that batch to convergence, then one adapt.
TEST(OnlineTrain, SingleBatchMatchesManualLoop) {
  const RatingsDataset d = ratings(60, 4);
  std::vector<std::size_t> batch(60);
  std::iota(batch.begin(), batch.end(), 0);
  OnlineConfig cfg;
  cfg.batch_size = 10;
  cfg.max_passes = 7;

  MatrixFactorization a(small_table(3, 1), small_table(3, 2), d);
  NbAntController ca(3, 1);
  StepClock clock_a;
  const std::vector<std::vector<std::size_t>> stream{batch};
  online_train(a, ca, stream, clock_a, cfg);

  MatrixFactorization b(small_table(3, 1), small_table(3, 2), d);
  NbAntController cb(3, 1);
  StepClock clock_b;
  double prev = b.data_loss(batch);
  for (std::size_t p = 0; p < cfg.max_passes; ++p) {
    train_epoch(b, batch, cfg.batch_size, clock_b);
    const double now = b.data_loss(batch);
    const bool done = prev - now < cfg.tol * std::abs(prev);
    prev = now;
    if (done) break;
  }
  auto tb = ant_tables(b);
  cb.adapt(tb, sva_objective(prev, total_nnz(b), total_anchors(b), cfg.objective));
  EXPECT_EQ(ca.k(), cb.k());
  EXPECT_EQ(clock_a.steps(), clock_b.steps());
  EXPECT_EQ(a.data_loss(batch), b.data_loss(batch));
}

}  // namespace
}  // namespace ant
