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

#include "ant/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ant/error.hpp"

namespace ant {

namespace {

void require_same_length(std::span<const double> y, std::span<const double> p) {
  if (y.size() != p.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "loss: target length " + std::to_string(y.size()) +
                    " != prediction length " + std::to_string(p.size()));
  }
}

void require_distribution(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + ": negative or NaN probability");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

void softmax_into(std::span<const double> logits, std::span<double> out) {
  if (logits.empty()) return;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp(logits[j] - peak);
    total += out[j];
  }
  for (std::size_t j = 0; j < logits.size(); ++j) out[j] /= total;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  softmax_into(logits, out);
  return out;
}

LossValue bregman_loss(std::span<const double> y, std::span<const double> yhat,
                       LossKind kind) {
  require_same_length(y, yhat);
  LossValue out;
  switch (kind) {
    case LossKind::kSquaredError: {
      double s = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double r = y[j] - yhat[j];
        s += r * r;
      }
      out.value = 0.5 * s;
      break;
    }
    case LossKind::kCrossEntropy: {
      require_distribution(yhat, "cross-entropy prediction");
      double s = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] == 0.0) continue;
        double p = yhat[j];
        if (p < kProbabilityFloor) {
          p = kProbabilityFloor;
          out.clamped = true;
        }
        s -= y[j] * std::log(p);
      }
      out.value = s;
      break;
    }
  }
  return out;
}

std::vector<double> bregman_grad(std::span<const double> y, std::span<const double> pred,
                                 LossKind kind) {
  require_same_length(y, pred);
  std::vector<double> g(y.size());
  switch (kind) {
    case LossKind::kSquaredError:
      for (std::size_t j = 0; j < y.size(); ++j) g[j] = pred[j] - y[j];
      break;
    case LossKind::kCrossEntropy:
      softmax_into(pred, g);
      for (std::size_t j = 0; j < y.size(); ++j) g[j] -= y[j];
      break;
  }
  return g;
}

}  // namespace ant
