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

#ifndef ANT_MODEL_HPP
#define ANT_MODEL_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ant/anchors.hpp"
#include "ant/dense_matrix.hpp"
#include "ant/optim.hpp"
#include "ant/random.hpp"
#include "ant/sparse_matrix.hpp"

namespace ant {

struct Regularization {
  double lambda2 = 0.0;
  bool nonneg = true;
  double ortho_weight = 0.0;
  double neg_pair_weight = 0.0;
  std::shared_ptr<const SparseRowMatrix> mask_complement;
  std::vector<std::pair<Index, Index>> negatives;
};

/// E = T * A with A (K x d) dense and T (|V| x K) sparse.
struct AntModel {
  DenseMatrix anchors;
  SparseRowMatrix transform;
  Regularization reg;
  /// Object id behind each anchor row; empty for random bases.
  std::vector<Index> anchor_ids;

  std::size_t vocab_size() const noexcept { return transform.rows(); }
  std::size_t num_anchors() const noexcept { return anchors.rows(); }
  std::size_t dim() const noexcept { return anchors.cols(); }

  /// Throws kDimensionMismatch / kInvalidArgument on a broken invariant.
  void validate() const;
};

struct TransformInit {
  std::size_t per_row = 16;
  double scale = 0.1;
};

/// Each row gets min(K, per_row) distinct columns drawn uniformly, with
/// values scale * |N(0, 1)| (signed when nonneg is off).
SparseRowMatrix init_transform(std::size_t rows, std::size_t k, bool nonneg,
                               std::uint64_t seed, TransformInit init = {});

/// A from init_anchor_matrix(plan), T from init_transform. For object-based
/// plans the anchor object's own row additionally gets weight 1 on its column.
AntModel make_ant_model(std::size_t vocab_size, const AnchorPlan& plan, std::size_t d,
                        Regularization reg, std::uint64_t seed,
                        const PretrainedEmbeddings* pretrained = nullptr,
                        TransformInit init = {});

/// Rows of E for `indices`. Empty T rows give zero vectors.
DenseMatrix embed(const AntModel& model, std::span<const Index> indices);

struct MixtureMember {
  DenseMatrix anchors;
  SparseRowMatrix transform;
};

struct MixtureModel {
  std::vector<MixtureMember> members;
  void validate() const;
};

struct MixtureEmbedding {
  DenseMatrix rows;
  /// True where the row is empty in every member (its output is zero).
  std::vector<bool> empty;
};

/// Per member: softmax over the stored entries of the row, then the weighted
/// sum of that member's anchors. Members are summed.
MixtureEmbedding mixture_embed(const MixtureModel& mix, std::span<const Index> indices);

struct ParamCount {
  std::size_t anchor = 0;         // K * d
  std::size_t transform_nnz = 0;  // nnz(T)
  std::size_t total = 0;          // anchor + transform_nnz
  std::size_t zero_rows = 0;      // rows of T with no stored entry

  friend bool operator==(const ParamCount&, const ParamCount&) = default;
};

ParamCount count_params(const AntModel& model);

// ---------------------------------------------------------------------------
// Trainable embedding tables
// ---------------------------------------------------------------------------

/// An embedding table a task harness can read rows from and push row
/// gradients into. Gradients accumulate until apply() or discard().
class EmbeddingTable {
 public:
  virtual ~EmbeddingTable() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual void embed_row(Index id, std::span<double> out) const = 0;
  /// Adds dL/de for row `id`.
  virtual void accumulate(Index id, std::span<const double> grad) = 0;
  /// Adds the gradients of the smooth auxiliary penalties and returns their
  /// weighted value. Called once per batch.
  virtual double add_penalties() { return 0.0; }
  virtual bool gradients_finite() const = 0;
  /// One optimizer step (plus the prox for sparse transforms); clears the
  /// accumulated gradients.
  virtual void apply(const StepContext& ctx) = 0;
  virtual void discard() = 0;
  virtual ParamCount count() const = 0;
  virtual std::size_t num_anchors() const = 0;
};

/// Plain |V| x d table. Only rows touched in a step are updated.
class DenseEmbedding final : public EmbeddingTable {
 public:
  explicit DenseEmbedding(DenseMatrix table);
  static DenseEmbedding gaussian(std::size_t rows, std::size_t d, double stddev,
                                 std::uint64_t seed);

  std::size_t size() const override { return table_.rows(); }
  std::size_t dim() const override { return table_.cols(); }
  void embed_row(Index id, std::span<double> out) const override;
  void accumulate(Index id, std::span<const double> grad) override;
  bool gradients_finite() const override;
  void apply(const StepContext& ctx) override;
  void discard() override;
  /// Counted as K = |V| anchors and no transform entries.
  ParamCount count() const override;
  std::size_t num_anchors() const override { return table_.rows(); }

  const DenseMatrix& table() const noexcept { return table_; }
  const DenseMatrix& grad() const noexcept { return grad_; }

 private:
  DenseMatrix table_;
  DenseMatrix grad_;
  DenseMatrix m_;
  DenseMatrix v_;
  std::vector<char> touched_flag_;
  std::vector<Index> touched_;
};

/// Which transform entries receive gradients.
enum class TransformGradient {
  /// Entries stored at initialization, and every entry of a column added
  /// later, until the prox first sets them to zero. Pruned entries stay
  /// pruned, so nnz(T) only falls between anchor additions.
  kActive,
  /// Every entry of a touched row; pruned entries can come back.
  kFullRow,
};

TransformGradient parse_transform_gradient(std::string_view name);

/// Trainable ANT table. A is updated densely every step; T is updated on the
/// rows touched in the step and then shrunk by the prox at threshold
/// lr * lambda2.
class AntEmbedding final : public EmbeddingTable {
 public:
  explicit AntEmbedding(AntModel model,
                        TransformGradient policy = TransformGradient::kActive);

  std::size_t size() const override { return model_.vocab_size(); }
  std::size_t dim() const override { return model_.dim(); }
  void embed_row(Index id, std::span<double> out) const override;
  void accumulate(Index id, std::span<const double> grad) override;
  double add_penalties() override;
  bool gradients_finite() const override;
  void apply(const StepContext& ctx) override;
  void discard() override;
  ParamCount count() const override { return count_params(model_); }
  std::size_t num_anchors() const override { return model_.num_anchors(); }

  const AntModel& model() const noexcept { return model_; }
  /// Keeps T fixed; only A is trained.
  void set_freeze_transform(bool freeze) { freeze_transform_ = freeze; }

  /// Appends n anchors: buffered ones newest-first, then fresh rows drawn
  /// from N(0, 1/d) with empty T columns.
  void grow(std::size_t n, Rng& rng);
  /// Moves the trailing n anchors (A rows, T columns, optimizer state) into
  /// the buffer. Returns the number removed; at least one anchor remains.
  std::size_t shrink(std::size_t n);
  std::size_t buffered() const noexcept { return buffer_.size(); }

  const DenseMatrix& anchor_grad() const noexcept { return a_grad_; }
  std::span<const double> transform_grad_row(Index row) const { return t_grad_.row(row); }

 private:
  struct Removed {
    std::vector<double> a_row, a_m, a_v;
    SparseColumn t_col;
    std::vector<double> t_m, t_v, t_active;
    std::optional<Index> anchor_id;
  };

  void touch(Index row);
  bool exempt(Index row, Index col) const;

  AntModel model_;
  DenseMatrix a_grad_, a_m_, a_v_;
  DenseMatrix t_grad_, t_m_, t_v_;
  DenseMatrix t_active_;  // 1 where an entry may receive gradient
  TransformGradient policy_;
  std::vector<char> touched_flag_;
  std::vector<Index> touched_;
  bool freeze_transform_ = false;
  std::vector<Removed> buffer_;
};

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct BatchLoss {
  double data = 0.0;     // sum of per-example Bregman losses
  double penalty = 0.0;  // weighted auxiliary penalties
};

/// A task bound to its training examples and trainable parameters.
class TaskHarness {
 public:
  virtual ~TaskHarness() = default;

  virtual std::size_t num_examples() const = 0;
  /// Forward and backward over the listed training examples; gradients stay
  /// pending until apply() or discard().
  virtual BatchLoss accumulate(std::span<const std::size_t> batch) = 0;
  virtual bool gradients_finite() const = 0;
  virtual void apply(const StepContext& ctx) = 0;
  virtual void discard() = 0;
  /// Summed Bregman loss over the listed training examples, no gradients.
  virtual double data_loss(std::span<const std::size_t> examples) const = 0;

  /// Embedding tables, for parameter accounting and anchor-count control.
  virtual std::vector<EmbeddingTable*> tables() = 0;
  virtual std::vector<const EmbeddingTable*> tables() const = 0;
};

std::size_t total_nnz(const TaskHarness& harness);
std::size_t total_anchors(const TaskHarness& harness);

struct EpochReport {
  double train_loss = 0.0;  // mean data loss per example seen
  double penalty = 0.0;     // penalty of the last step
  std::size_t examples = 0;
  std::size_t steps = 0;
  std::size_t nnz = 0;
  std::size_t k = 0;
  bool aborted = false;  // a non-finite loss or gradient stopped the epoch
};

/// Runs the batches of `order` in sequence. A batch with a non-finite loss or
/// gradient is discarded before any parameter changes and ends the epoch.
EpochReport train_epoch(TaskHarness& harness, std::span<const std::size_t> order,
                        std::size_t batch_size, StepClock& clock);

/// 0..n-1 in a seeded uniformly random order.
std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng);

}  // namespace ant

#endif  // ANT_MODEL_HPP
