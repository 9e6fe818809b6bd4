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

#include "ant/nbant.hpp"

#include <algorithm>
#include <cmath>

#include "ant/error.hpp"

namespace ant {

double sva_objective(double pred_loss, std::size_t nnz_t, std::size_t k,
                     const SvaObjective& obj) {
  return pred_loss + obj.lambda2 * static_cast<double>(nnz_t) +
         (obj.lambda1 - obj.lambda2) * static_cast<double>(k);
}

const char* to_string(Trend t) {
  switch (t) {
    case Trend::kDecreasing: return "decreasing";
    case Trend::kIncreasing: return "increasing";
    case Trend::kFlat: return "flat";
  }
  return "flat";
}

Trend trend(std::span<const double> history, double tol) {
  if (history.size() < 2) return Trend::kFlat;
  const double last = history[history.size() - 1];
  const double prev = history[history.size() - 2];
  if (last < prev * (1.0 - tol)) return Trend::kDecreasing;
  if (last > prev * (1.0 + tol)) return Trend::kIncreasing;
  return Trend::kFlat;
}

const char* to_string(AdaptAction a) {
  switch (a) {
    case AdaptAction::kGrow: return "grow";
    case AdaptAction::kShrink: return "shrink";
    case AdaptAction::kKeep: return "keep";
  }
  return "keep";
}

NbAntController::NbAntController(std::size_t k, std::size_t delta_k, double tol,
                                 std::uint64_t seed)
    : k_(k), delta_k_(delta_k), tol_(tol), rng_(seed) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "nbANT: K must be >= 1");
  if (delta_k == 0) throw Error(ErrorCode::kInvalidArgument, "nbANT: delta K must be >= 1");
  if (tol < 0.0) throw Error(ErrorCode::kInvalidArgument, "nbANT: negative tolerance");
}

AdaptReport NbAntController::adapt(std::span<AntEmbedding* const> tables, double objective) {
  for (const auto* t : tables) {
    if (t->num_anchors() != k_) {
      throw Error(ErrorCode::kDimensionMismatch, "nbANT: table K differs from controller K");
    }
  }
  history_.push_back(objective);
  AdaptReport report;
  report.k_before = k_;
  switch (trend(history_, tol_)) {
    case Trend::kDecreasing:
      for (auto* t : tables) t->grow(delta_k_, rng_);
      k_ += delta_k_;
      report.action = AdaptAction::kGrow;
      break;
    case Trend::kIncreasing: {
      const std::size_t n = std::min(delta_k_, k_ - 1);
      if (n > 0) {
        for (auto* t : tables) t->shrink(n);
        k_ -= n;
        report.action = AdaptAction::kShrink;
      }
      break;
    }
    case Trend::kFlat:
      break;
  }
  report.k_after = k_;
  return report;
}

std::vector<AntEmbedding*> ant_tables(TaskHarness& harness) {
  std::vector<AntEmbedding*> out;
  for (auto* t : harness.tables()) {
    auto* ant = dynamic_cast<AntEmbedding*>(t);
    if (ant == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "nbANT needs ANT embedding tables");
    }
    out.push_back(ant);
  }
  return out;
}

OnlineReport online_train(TaskHarness& harness, NbAntController& controller,
                          std::span<const std::vector<std::size_t>> stream,
                          StepClock& clock, const OnlineConfig& cfg) {
  if (stream.empty()) throw Error(ErrorCode::kInvalidArgument, "online_train: empty stream");
  auto tables = ant_tables(harness);
  OnlineReport report;
  for (const auto& batch : stream) {
    if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "online_train: empty batch");
    double prev = harness.data_loss(batch);
    std::size_t passes = 0;
    while (passes < cfg.max_passes) {
      const auto epoch = train_epoch(harness, batch, cfg.batch_size, clock);
      ++passes;
      if (epoch.aborted) {
        report.aborted = true;
        break;
      }
      const double now = harness.data_loss(batch);
      const bool converged = prev - now < cfg.tol * std::abs(prev);
      prev = now;
      if (converged) break;
    }
    report.passes.push_back(passes);
    if (report.aborted) break;
    const double obj = sva_objective(prev, total_nnz(harness), total_anchors(harness),
                                     cfg.objective);
    controller.adapt(tables, obj);
    report.k_trajectory.push_back(controller.k());
    report.final_loss = prev / static_cast<double>(batch.size());
  }
  report.nnz = total_nnz(harness);
  return report;
}

}  // namespace ant
