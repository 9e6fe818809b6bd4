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

#include "ant/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ant/losses.hpp"

namespace ant {

void AntModel::validate() const {
  if (transform.cols() != anchors.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model: T has " + std::to_string(transform.cols()) + " columns but A has " +
                    std::to_string(anchors.rows()) + " rows");
  }
  if (reg.nonneg && !transform.nonneg()) {
    throw Error(ErrorCode::kInvalidArgument, "model: nonneg regularization on a signed T");
  }
  if (reg.lambda2 < 0.0 || reg.ortho_weight < 0.0 || reg.neg_pair_weight < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "model: negative regularization weight");
  }
  if (!anchor_ids.empty() && anchor_ids.size() != anchors.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "model: one anchor id per anchor row");
  }
  if (!anchors.all_finite()) throw Error(ErrorCode::kNumerical, "model: non-finite A");
  transform.validate();
}

SparseRowMatrix init_transform(std::size_t rows, std::size_t k, bool nonneg,
                               std::uint64_t seed, TransformInit init) {
  SparseRowMatrix t(rows, k, nonneg);
  const std::size_t per_row = std::min(k, init.per_row);
  Rng rng(seed);
  std::vector<Index> cols(k);
  for (Index r = 0; r < rows; ++r) {
    std::iota(cols.begin(), cols.end(), 0);
    // Partial Fisher-Yates: the first per_row slots are a uniform sample.
    for (std::size_t j = 0; j < per_row; ++j) {
      std::swap(cols[j], cols[j + uniform_index(rng, k - j)]);
    }
    std::sort(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(per_row));
    std::vector<SparseEntry> entries;
    entries.reserve(per_row);
    for (std::size_t j = 0; j < per_row; ++j) {
      double x = init.scale * standard_normal(rng);
      if (nonneg) x = std::abs(x);
      if (x != 0.0) entries.push_back({static_cast<std::uint32_t>(cols[j]), x});
    }
    t.set_row(r, std::move(entries));
  }
  return t;
}

AntModel make_ant_model(std::size_t vocab_size, const AnchorPlan& plan, std::size_t d,
                        Regularization reg, std::uint64_t seed,
                        const PretrainedEmbeddings* pretrained, TransformInit init) {
  AntModel model;
  model.anchors = init_anchor_matrix(plan, d, pretrained);
  model.transform =
      init_transform(vocab_size, plan.k, reg.nonneg, seed ^ 0x9e3779b97f4a7c15ULL, init);
  model.anchor_ids = plan.anchor_ids;
  for (Index c = 0; c < model.anchor_ids.size(); ++c) {
    if (model.anchor_ids[c] >= vocab_size) {
      throw Error(ErrorCode::kOutOfRange, "anchor id outside the vocabulary");
    }
    model.transform.set(model.anchor_ids[c], c, 1.0);
  }
  model.reg = std::move(reg);
  model.validate();
  return model;
}

DenseMatrix embed(const AntModel& model, std::span<const Index> indices) {
  return lookup_rows(indices, model.transform, model.anchors);
}

void MixtureModel::validate() const {
  if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "mixture: no members");
  const auto rows = members.front().transform.rows();
  const auto d = members.front().anchors.cols();
  for (const auto& m : members) {
    if (m.transform.rows() != rows || m.anchors.cols() != d ||
        m.transform.cols() != m.anchors.rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "mixture: inconsistent member shapes");
    }
  }
}

MixtureEmbedding mixture_embed(const MixtureModel& mix, std::span<const Index> indices) {
  mix.validate();
  const std::size_t d = mix.members.front().anchors.cols();
  const std::size_t rows = mix.members.front().transform.rows();
  MixtureEmbedding out{DenseMatrix(indices.size(), d), std::vector<bool>(indices.size(), true)};
  std::vector<double> logits;
  std::vector<double> weights;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const Index id = indices[j];
    if (id >= rows) throw Error(ErrorCode::kOutOfRange, "mixture_embed: index out of range");
    auto dst = out.rows.row(j);
    for (const auto& m : mix.members) {
      const auto entries = m.transform.row(id);
      if (entries.empty()) continue;
      out.empty[j] = false;
      logits.resize(entries.size());
      weights.resize(entries.size());
      for (std::size_t e = 0; e < entries.size(); ++e) logits[e] = entries[e].value;
      softmax_into(logits, weights);
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto a = m.anchors.row(entries[e].col);
        for (std::size_t c = 0; c < d; ++c) dst[c] += weights[e] * a[c];
      }
    }
  }
  return out;
}

ParamCount count_params(const AntModel& model) {
  ParamCount p;
  p.anchor = model.num_anchors() * model.dim();
  p.transform_nnz = model.transform.nnz();
  p.total = p.anchor + p.transform_nnz;
  for (Index r = 0; r < model.transform.rows(); ++r) {
    if (model.transform.row(r).empty()) ++p.zero_rows;
  }
  return p;
}

// ---------------------------------------------------------------------------
// DenseEmbedding
// ---------------------------------------------------------------------------

namespace {

bool finite_rows(const DenseMatrix& g, std::span<const Index> rows) {
  for (Index r : rows) {
    for (double x : g.row(r)) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

void check_row_grad(Index id, std::size_t rows, std::size_t d,
                    std::span<const double> grad) {
  if (id >= rows) throw Error(ErrorCode::kOutOfRange, "embedding row out of range");
  if (grad.size() != d) throw Error(ErrorCode::kDimensionMismatch, "embedding grad width");
}

}  // namespace

DenseEmbedding::DenseEmbedding(DenseMatrix table)
    : table_(std::move(table)),
      grad_(table_.rows(), table_.cols()),
      m_(table_.rows(), table_.cols()),
      v_(table_.rows(), table_.cols()),
      touched_flag_(table_.rows(), 0) {}

DenseEmbedding DenseEmbedding::gaussian(std::size_t rows, std::size_t d, double stddev,
                                        std::uint64_t seed) {
  DenseMatrix t(rows, d);
  Rng rng(seed);
  for (double& x : t.values()) x = stddev * standard_normal(rng);
  return DenseEmbedding(std::move(t));
}

void DenseEmbedding::embed_row(Index id, std::span<double> out) const {
  if (id >= table_.rows()) throw Error(ErrorCode::kOutOfRange, "embedding row out of range");
  const auto src = table_.row(id);
  std::copy(src.begin(), src.end(), out.begin());
}

void DenseEmbedding::accumulate(Index id, std::span<const double> grad) {
  check_row_grad(id, table_.rows(), table_.cols(), grad);
  if (!touched_flag_[id]) {
    touched_flag_[id] = 1;
    touched_.push_back(id);
  }
  auto g = grad_.row(id);
  for (std::size_t c = 0; c < g.size(); ++c) g[c] += grad[c];
}

bool DenseEmbedding::gradients_finite() const { return finite_rows(grad_, touched_); }

void DenseEmbedding::apply(const StepContext& ctx) {
  for (Index r : touched_) {
    yogi_update(table_.row(r), grad_.row(r), m_.row(r), v_.row(r), ctx);
  }
  discard();
}

void DenseEmbedding::discard() {
  for (Index r : touched_) {
    std::fill(grad_.row(r).begin(), grad_.row(r).end(), 0.0);
    touched_flag_[r] = 0;
  }
  touched_.clear();
}

ParamCount DenseEmbedding::count() const {
  ParamCount p;
  p.anchor = table_.size();
  p.total = p.anchor;
  return p;
}

// ---------------------------------------------------------------------------
// AntEmbedding
// ---------------------------------------------------------------------------

TransformGradient parse_transform_gradient(std::string_view name) {
  if (name == "active") return TransformGradient::kActive;
  if (name == "full_row") return TransformGradient::kFullRow;
  throw Error(ErrorCode::kInvalidArgument, "unknown transform gradient: " + std::string(name));
}

AntEmbedding::AntEmbedding(AntModel model, TransformGradient policy)
    : model_(std::move(model)),
      a_grad_(model_.num_anchors(), model_.dim()),
      a_m_(model_.num_anchors(), model_.dim()),
      a_v_(model_.num_anchors(), model_.dim()),
      t_grad_(model_.vocab_size(), model_.num_anchors()),
      t_m_(model_.vocab_size(), model_.num_anchors()),
      t_v_(model_.vocab_size(), model_.num_anchors()),
      t_active_(model_.vocab_size(), model_.num_anchors(),
                policy == TransformGradient::kFullRow ? 1.0 : 0.0),
      policy_(policy),
      touched_flag_(model_.vocab_size(), 0) {
  model_.validate();
  if (policy_ == TransformGradient::kActive) {
    for (Index r = 0; r < model_.vocab_size(); ++r) {
      for (const auto& e : model_.transform.row(r)) t_active_(r, e.col) = 1.0;
    }
  }
}

void AntEmbedding::embed_row(Index id, std::span<double> out) const {
  lookup_row_into(id, model_.transform, model_.anchors, out);
}

void AntEmbedding::touch(Index row) {
  if (!touched_flag_[row]) {
    touched_flag_[row] = 1;
    touched_.push_back(row);
  }
}

void AntEmbedding::accumulate(Index id, std::span<const double> grad) {
  check_row_grad(id, size(), dim(), grad);
  for (const auto& e : model_.transform.row(id)) {
    auto ga = a_grad_.row(e.col);
    for (std::size_t c = 0; c < ga.size(); ++c) ga[c] += e.value * grad[c];
  }
  if (freeze_transform_) return;
  touch(id);
  auto gt = t_grad_.row(id);
  const auto active = t_active_.row(id);
  for (Index k = 0; k < gt.size(); ++k) {
    if (active[k] != 0.0) gt[k] += dot(grad, model_.anchors.row(k));
  }
}

double AntEmbedding::add_penalties() {
  double value = 0.0;
  const auto& reg = model_.reg;
  if (reg.ortho_weight > 0.0) {
    const auto p = orthogonality_penalty(model_.anchors);
    value += reg.ortho_weight * p.value;
    auto dst = a_grad_.values();
    const auto src = p.grad.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += reg.ortho_weight * src[i];
  }
  if (reg.neg_pair_weight > 0.0 && !reg.negatives.empty()) {
    const auto p = negative_pair_penalty(model_.transform, reg.negatives);
    value += reg.neg_pair_weight * p.value;
    if (!freeze_transform_) {
      for (const auto& [row, g] : p.grad) {
        touch(row);
        auto gt = t_grad_.row(row);
        const auto active = t_active_.row(row);
        for (std::size_t k = 0; k < g.size(); ++k) {
          if (active[k] != 0.0) gt[k] += reg.neg_pair_weight * g[k];
        }
      }
    }
  }
  return value;
}

bool AntEmbedding::gradients_finite() const {
  return a_grad_.all_finite() && finite_rows(t_grad_, touched_);
}

bool AntEmbedding::exempt(Index row, Index col) const {
  const auto* mask = model_.reg.mask_complement.get();
  return mask != nullptr && row < mask->rows() && mask->get(row, col) != 0.0;
}

void AntEmbedding::apply(const StepContext& ctx) {
  yogi_update(model_.anchors.values(), a_grad_.values(), a_m_.values(), a_v_.values(), ctx);
  a_grad_.fill(0.0);

  const std::size_t k = model_.num_anchors();
  const double threshold = ctx.lr * model_.reg.lambda2;
  const bool nonneg = model_.reg.nonneg;
  const bool sticky = policy_ == TransformGradient::kActive;
  std::vector<double> dense(k);
  std::vector<Index> cols;
  std::vector<double> p, g, m, v;
  std::vector<SparseEntry> entries;
  for (Index r : touched_) {
    std::fill(dense.begin(), dense.end(), 0.0);
    for (const auto& e : model_.transform.row(r)) dense[e.col] = e.value;
    auto active = t_active_.row(r);
    auto gr = t_grad_.row(r);
    auto mr = t_m_.row(r);
    auto vr = t_v_.row(r);
    cols.clear();
    p.clear();
    g.clear();
    m.clear();
    v.clear();
    for (Index c = 0; c < k; ++c) {
      if (active[c] == 0.0) continue;
      cols.push_back(c);
      p.push_back(dense[c]);
      g.push_back(gr[c]);
      m.push_back(mr[c]);
      v.push_back(vr[c]);
    }
    yogi_update(p, g, m, v, ctx);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      dense[cols[j]] = p[j];
      mr[cols[j]] = m[j];
      vr[cols[j]] = v[j];
    }
    entries.clear();
    for (Index c = 0; c < k; ++c) {
      const double x = prox_scalar(dense[c], threshold, nonneg, exempt(r, c));
      if (x != 0.0) {
        entries.push_back({static_cast<std::uint32_t>(c), x});
      } else if (sticky) {
        active[c] = 0.0;
      }
    }
    model_.transform.set_row(r, entries);
  }
  discard();
}

void AntEmbedding::discard() {
  a_grad_.fill(0.0);
  for (Index r : touched_) {
    std::fill(t_grad_.row(r).begin(), t_grad_.row(r).end(), 0.0);
    touched_flag_[r] = 0;
  }
  touched_.clear();
}

namespace {

std::vector<double> take_col(DenseMatrix& m) {
  std::vector<double> col(m.rows());
  for (Index r = 0; r < m.rows(); ++r) col[r] = m(r, m.cols() - 1);
  m.drop_trailing_cols(1);
  return col;
}

void put_col(DenseMatrix& m, const std::vector<double>& col) {
  m.append_zero_cols(1);
  for (Index r = 0; r < m.rows(); ++r) m(r, m.cols() - 1) = col[r];
}

std::vector<double> to_vector(const DenseMatrix& m) {
  return {m.values().begin(), m.values().end()};
}

}  // namespace

std::size_t AntEmbedding::shrink(std::size_t n) {
  discard();
  const std::size_t k = model_.num_anchors();
  n = std::min(n, k > 0 ? k - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    Removed rm;
    rm.a_row = to_vector(model_.anchors.take_trailing_rows(1));
    rm.a_m = to_vector(a_m_.take_trailing_rows(1));
    rm.a_v = to_vector(a_v_.take_trailing_rows(1));
    a_grad_.take_trailing_rows(1);
    rm.t_col = std::move(model_.transform.take_trailing_columns(1).front());
    rm.t_m = take_col(t_m_);
    rm.t_v = take_col(t_v_);
    rm.t_active = take_col(t_active_);
    t_grad_.drop_trailing_cols(1);
    if (!model_.anchor_ids.empty()) {
      rm.anchor_id = model_.anchor_ids.back();
      model_.anchor_ids.pop_back();
    }
    buffer_.push_back(std::move(rm));
  }
  return n;
}

void AntEmbedding::grow(std::size_t n, Rng& rng) {
  discard();
  const std::size_t d = model_.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    if (!buffer_.empty()) {
      Removed rm = std::move(buffer_.back());
      buffer_.pop_back();
      model_.anchors.append_rows(DenseMatrix(1, d, std::move(rm.a_row)));
      a_m_.append_rows(DenseMatrix(1, d, std::move(rm.a_m)));
      a_v_.append_rows(DenseMatrix(1, d, std::move(rm.a_v)));
      model_.transform.append_column(rm.t_col);
      put_col(t_m_, rm.t_m);
      put_col(t_v_, rm.t_v);
      put_col(t_active_, rm.t_active);
      if (rm.anchor_id && model_.anchor_ids.size() + 1 == model_.anchors.rows()) {
        model_.anchor_ids.push_back(*rm.anchor_id);
      } else {
        model_.anchor_ids.clear();
      }
    } else {
      DenseMatrix row(1, d);
      for (double& x : row.values()) x = scale * standard_normal(rng);
      model_.anchors.append_rows(row);
      a_m_.append_rows(DenseMatrix(1, d));
      a_v_.append_rows(DenseMatrix(1, d));
      model_.transform.add_columns(1);
      t_m_.append_zero_cols(1);
      t_v_.append_zero_cols(1);
      // The empty column is open to every row until pruned.
      put_col(t_active_, std::vector<double>(model_.vocab_size(), 1.0));
      // A fresh anchor is not tied to any object, so ids stop lining up.
      model_.anchor_ids.clear();
    }
    a_grad_.append_rows(DenseMatrix(1, d));
    t_grad_.append_zero_cols(1);
  }
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

std::size_t total_nnz(const TaskHarness& harness) {
  std::size_t n = 0;
  for (const auto* t : harness.tables()) n += t->count().transform_nnz;
  return n;
}

std::size_t total_anchors(const TaskHarness& harness) {
  std::size_t n = 0;
  for (const auto* t : harness.tables()) n += t->num_anchors();
  return n;
}

EpochReport train_epoch(TaskHarness& harness, std::span<const std::size_t> order,
                        std::size_t batch_size, StepClock& clock) {
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  EpochReport report;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const auto batch = order.subspan(start, std::min(batch_size, order.size() - start));
    const BatchLoss loss = harness.accumulate(batch);
    if (!std::isfinite(loss.data) || !std::isfinite(loss.penalty) ||
        !harness.gradients_finite()) {
      harness.discard();
      report.aborted = true;
      break;
    }
    harness.apply(clock.tick());
    loss_sum += loss.data;
    report.penalty = loss.penalty;
    report.examples += batch.size();
    ++report.steps;
  }
  report.train_loss =
      report.examples > 0 ? loss_sum / static_cast<double>(report.examples) : 0.0;
  report.nnz = total_nnz(harness);
  report.k = total_anchors(harness);
  return report;
}

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  return order;
}

}  // namespace ant
