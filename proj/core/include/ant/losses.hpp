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

#ifndef ANT_LOSSES_HPP
#define ANT_LOSSES_HPP

#include <span>
#include <vector>

namespace ant {

/// Bregman divergences paired with their exponential-family emissions:
/// a unit-variance Gaussian gives squared error, a categorical gives
/// cross-entropy.
enum class LossKind { kSquaredError, kCrossEntropy };

inline constexpr double kProbabilityFloor = 1e-12;

struct LossValue {
  double value = 0.0;
  /// Set when a prediction of 0 on the target's support was clamped to
  /// kProbabilityFloor.
  bool clamped = false;
};

/// Squared error: 0.5 * ||y - yhat||^2.
/// Cross-entropy: -sum_j y_j log yhat_j, with yhat a probability vector. The
/// target entropy term sum_j y_j log y_j is constant in the parameters and is
/// left out, so the value is the divergence only up to that constant.
LossValue bregman_loss(std::span<const double> y, std::span<const double> yhat,
                       LossKind kind);

/// Squared error: gradient w.r.t. yhat, i.e. yhat - y.
/// Cross-entropy: gradient w.r.t. the logits feeding a softmax, i.e.
/// softmax(logits) - y. Note that `pred` is logits here, not probabilities.
std::vector<double> bregman_grad(std::span<const double> y, std::span<const double> pred,
                                 LossKind kind);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);
void softmax_into(std::span<const double> logits, std::span<double> out);

}  // namespace ant

#endif  // ANT_LOSSES_HPP
