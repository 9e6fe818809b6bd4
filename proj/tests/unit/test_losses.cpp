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
#include <vector>

#include "ant/error.hpp"
#include "ant/losses.hpp"
#include "ant/random.hpp"

namespace ant {
namespace {

TEST(BregmanLoss, SquaredHand) {
  const std::vector<double> y{3}, p{1};
  EXPECT_DOUBLE_EQ(bregman_loss(y, p, LossKind::kSquaredError).value, 2.0);
  EXPECT_EQ(bregman_loss(y, y, LossKind::kSquaredError).value, 0.0);
}

TEST(BregmanLoss, CrossEntropyHand) {
  const std::vector<double> y{0, 1}, p{0.25, 0.75};
  EXPECT_NEAR(bregman_loss(y, p, LossKind::kCrossEntropy).value, 0.2876820724517809, 1e-12);
}

TEST(BregmanLoss, CrossEntropyClampsZero) {
  const std::vector<double> y{1, 0}, p{0.0, 1.0};
  const LossValue l = bregman_loss(y, p, LossKind::kCrossEntropy);
  EXPECT_TRUE(l.clamped);
  EXPECT_NEAR(l.value, -std::log(kProbabilityFloor), 1e-9);
}

TEST(BregmanLoss, Errors) {
  const std::vector<double> y{1, 0}, p{1};
  EXPECT_THROW(bregman_loss(y, p, LossKind::kSquaredError), Error);
  const std::vector<double> bad{0.5, 0.6};
  EXPECT_THROW(bregman_loss(y, bad, LossKind::kCrossEntropy), Error);
}

TEST(BregmanGrad, Hand) {
  const std::vector<double> y{3}, p{1};
  EXPECT_EQ(bregman_grad(y, p, LossKind::kSquaredError), (std::vector<double>{-2}));
  const std::vector<double> oh{1, 0}, logits{0, 0};
  const auto g = bregman_grad(oh, logits, LossKind::kCrossEntropy);
  EXPECT_DOUBLE_EQ(g[0], -0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
}

// Loss as a function of the prediction (squared) or logits (cross-entropy).
double loss_at(const std::vector<double>& y, const std::vector<double>& x, LossKind kind) {
  if (kind == LossKind::kSquaredError) return bregman_loss(y, x, kind).value;
  return bregman_loss(y, softmax(x), kind).value;
}

std::vector<double> random_target(std::size_t n, LossKind kind, Rng& rng) {
  std::vector<double> y(n);
  if (kind == LossKind::kSquaredError) {
    for (double& v : y) v = 3.0 * standard_normal(rng);
  } else {
    double total = 0.0;
    for (double& v : y) total += (v = uniform01(rng));
    for (double& v : y) v /= total;
  }
  return y;
}

class GradientCheck : public ::testing::TestWithParam<LossKind> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const LossKind kind = GetParam();
  Rng rng(kind == LossKind::kSquaredError ? 1 : 2);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 6);
    const auto y = random_target(n, kind, rng);
    std::vector<double> x(n);
    for (double& v : x) v = 2.0 * standard_normal(rng);
    const auto g = bregman_grad(y, x, kind);
    for (std::size_t j = 0; j < n; ++j) {
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (loss_at(y, xp, kind) - loss_at(y, xm, kind)) / (2 * h);
      EXPECT_LE(std::abs(fd - g[j]), 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, GradientCheck,
                         ::testing::Values(LossKind::kSquaredError, LossKind::kCrossEntropy));

TEST(BregmanLoss, ConvexAlongRandomSegments) {
  Rng rng(4);
  for (LossKind kind : {LossKind::kSquaredError, LossKind::kCrossEntropy}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + uniform_index(rng, 5);
      const auto y = random_target(n, kind, rng);
      std::vector<double> a(n), b(n), mid(n);
      for (std::size_t j = 0; j < n; ++j) {
        a[j] = 3.0 * standard_normal(rng);
        b[j] = 3.0 * standard_normal(rng);
      }
      const double t = uniform01(rng);
      for (std::size_t j = 0; j < n; ++j) mid[j] = t * a[j] + (1 - t) * b[j];
      EXPECT_LE(loss_at(y, mid, kind),
                t * loss_at(y, a, kind) + (1 - t) * loss_at(y, b, kind) + 1e-12);
    }
  }
}

TEST(Softmax, StableForLargeLogits) {
  const std::vector<double> logits{1000.0, 1000.0};
  const auto p = softmax(logits);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

}  // namespace
}  // namespace ant
