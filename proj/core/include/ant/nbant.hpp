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

#ifndef ANT_NBANT_HPP
#define ANT_NBANT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ant/model.hpp"
#include "ant/optim.hpp"
#include "ant/random.hpp"

namespace ant {

struct SvaObjective {
  double lambda1 = 0.01;
  double lambda2 = 1e-4;
};

/// pred_loss + lambda2 * nnz_t + (lambda1 - lambda2) * K.
double sva_objective(double pred_loss, std::size_t nnz_t, std::size_t k,
                     const SvaObjective& obj);

enum class Trend { kDecreasing, kIncreasing, kFlat };

const char* to_string(Trend t);

/// Compares the last value with the one before it, relative tolerance tol.
/// Fewer than two values is flat.
Trend trend(std::span<const double> history, double tol);

enum class AdaptAction { kGrow, kShrink, kKeep };

const char* to_string(AdaptAction a);

struct AdaptReport {
  AdaptAction action = AdaptAction::kKeep;
  std::size_t k_before = 0;
  std::size_t k_after = 0;
};

/// Grows or shrinks a set of tied ANT tables by delta_k after each epoch,
/// following the trend of the objective. Removed anchors live in each
/// table's own buffer so a later grow restores them.
class NbAntController {
 public:
  NbAntController(std::size_t k, std::size_t delta_k, double tol = 1e-4,
                  std::uint64_t seed = 0);

  std::size_t k() const noexcept { return k_; }
  std::size_t delta_k() const noexcept { return delta_k_; }
  double tol() const noexcept { return tol_; }
  const std::vector<double>& history() const noexcept { return history_; }

  /// Records `objective` and applies the resulting action to every table.
  /// Every table must currently hold k() anchors.
  AdaptReport adapt(std::span<AntEmbedding* const> tables, double objective);

 private:
  std::size_t k_;
  std::size_t delta_k_;
  double tol_;
  std::vector<double> history_;
  Rng rng_;
};

/// AntEmbedding tables of a harness; throws when a table is not ANT.
std::vector<AntEmbedding*> ant_tables(TaskHarness& harness);

/// Which examples feed the per-epoch objective.
enum class ObjectiveSource { kValidation, kTraining };

struct OnlineConfig {
  std::size_t batch_size = 32;
  double tol = 1e-4;          // relative improvement that ends a batch's passes
  std::size_t max_passes = 50;
  SvaObjective objective;
};

struct OnlineReport {
  std::vector<std::size_t> k_trajectory;  // tied K after each stream batch
  std::vector<std::size_t> passes;        // passes spent on each stream batch
  double final_loss = 0.0;                // mean data loss on the last batch
  std::size_t nnz = 0;
  bool aborted = false;
};

/// Streams batches once each: trains on a batch until its loss stops
/// improving by tol (relative) or max_passes, then adapts K using that batch
/// as the validation set.
OnlineReport online_train(TaskHarness& harness, NbAntController& controller,
                          std::span<const std::vector<std::size_t>> stream,
                          StepClock& clock, const OnlineConfig& cfg);

}  // namespace ant

#endif  // ANT_NBANT_HPP
