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

#ifndef ANT_OPTIM_HPP
#define ANT_OPTIM_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ant/dense_matrix.hpp"
#include "ant/sparse_matrix.hpp"

namespace ant {

// ---------------------------------------------------------------------------
// Yogi
// ---------------------------------------------------------------------------

struct YogiConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-3;
  /// Staircase decay: lr is multiplied by decay_factor once every
  /// decay_every completed steps. decay_every == 0 disables decay.
  double decay_factor = 1.0;
  std::size_t decay_every = 0;
};

/// Constants for one optimizer step, shared by every parameter block that
/// is updated in that step.
struct StepContext {
  std::size_t t = 1;
  double lr = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-3;
  double bias1 = 1.0;  // 1 - beta1^t
  double bias2 = 1.0;  // 1 - beta2^t (1 when beta2 == 1)
};

/// Learning rate in effect for step t (1-based).
double decayed_lr(const YogiConfig& cfg, std::size_t t);

/// Global step counter with the learning-rate schedule.
class StepClock {
 public:
  explicit StepClock(YogiConfig cfg = {}) : cfg_(cfg) {}

  /// Advances the step count and returns the context for the new step.
  StepContext tick();
  /// Context the next tick() would return, without advancing.
  StepContext peek() const;

  std::size_t steps() const noexcept { return steps_; }
  const YogiConfig& config() const noexcept { return cfg_; }

 private:
  YogiConfig cfg_;
  std::size_t steps_ = 0;
};

StepContext make_step_context(const YogiConfig& cfg, std::size_t t);

/// One Yogi update in place:
///   m <- b1 m + (1 - b1) g
///   v <- v - (1 - b2) sign(v - g^2) g^2
///   p <- p - lr * (m / bias1) / (sqrt(v / bias2) + eps)
void yogi_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const StepContext& ctx);

/// Standalone optimizer state for one parameter vector.
struct YogiState {
  YogiState() = default;
  explicit YogiState(std::size_t n, YogiConfig cfg = {})
      : m(n, 0.0), v(n, 0.0), config(cfg) {}

  std::vector<double> m;
  std::vector<double> v;
  YogiConfig config;
  std::size_t step = 0;
};

/// Advances `state` by one step and updates `param`. A non-finite gradient
/// raises kNumerical and leaves both untouched.
void yogi_step(std::span<double> param, std::span<const double> grad, YogiState& state);

/// Dense parameter block with its gradient buffer and Yogi moments.
struct DenseParameter {
  DenseParameter() = default;
  explicit DenseParameter(DenseMatrix initial)
      : value(std::move(initial)),
        grad(value.rows(), value.cols()),
        m(value.rows(), value.cols()),
        v(value.rows(), value.cols()) {}

  DenseMatrix value;
  DenseMatrix grad;
  DenseMatrix m;
  DenseMatrix v;

  void apply(const StepContext& ctx);
  void zero_grad() { grad.fill(0.0); }
};

// ---------------------------------------------------------------------------
// Proximal operator
// ---------------------------------------------------------------------------

struct ProxConfig {
  double lambda2 = 0.0;
  bool nonneg = true;
  /// Complement of the domain sparsity mask: entries stored here (value 1)
  /// belong to related pairs and are exempt from the l1 shrinkage.
  std::shared_ptr<const SparseRowMatrix> mask_complement;
};

/// Scalar form: clamp-only for exempt entries, otherwise soft-threshold at
/// `threshold` followed by projection onto [0, inf) when nonneg is set.
double prox_scalar(double t, double threshold, bool nonneg, bool exempt);

/// Applies the prox to every stored entry of one row in place and erases
/// entries that land on exactly zero. Returns the number erased.
std::size_t prox_row(SparseRowMatrix& t, Index row, double eta, const ProxConfig& cfg);

/// Whole-matrix form. `eta` must be non-negative.
SparseRowMatrix prox_step(const SparseRowMatrix& t, double eta, const ProxConfig& cfg);

// ---------------------------------------------------------------------------
// Auxiliary penalties
// ---------------------------------------------------------------------------

struct OrthogonalityPenalty {
  double value = 0.0;
  DenseMatrix grad;
};

/// sum over ordered pairs i != j of |a_i . a_j|, with its subgradient
/// (sign taken as 0 at the kink).
OrthogonalityPenalty orthogonality_penalty(const DenseMatrix& a);

struct NegativePairPenalty {
  double value = 0.0;
  /// Gradient rows (length T.cols()) keyed by transform row.
  std::map<Index, std::vector<double>> grad;
};

/// sum over pairs (u, v) of |t_u|^T |t_v|.
NegativePairPenalty negative_pair_penalty(const SparseRowMatrix& t,
                                          std::span<const std::pair<Index, Index>> pairs);

}  // namespace ant

#endif  // ANT_OPTIM_HPP
