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

#include "ant/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace ant {

namespace {

auto find_col(std::vector<SparseEntry>& entries, Index c) {
  return std::lower_bound(entries.begin(), entries.end(), c,
                          [](const SparseEntry& e, Index col) { return e.col < col; });
}

auto find_col(const std::vector<SparseEntry>& entries, Index c) {
  return std::lower_bound(entries.begin(), entries.end(), c,
                          [](const SparseEntry& e, Index col) { return e.col < col; });
}

}  // namespace

SparseRowMatrix::SparseRowMatrix(std::size_t rows, std::size_t cols, bool nonneg)
    : cols_(cols), nonneg_(nonneg), rows_(rows) {
  if (cols > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kOutOfRange, "sparse matrix: too many columns");
  }
}

void SparseRowMatrix::check_value(double value) const {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNumerical, "sparse matrix: non-finite value");
  }
  if (nonneg_ && value < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "sparse matrix: negative value in non-negative matrix");
  }
}

const std::vector<SparseEntry>& SparseRowMatrix::entries_of(Index r) const {
  if (r >= rows_.size()) {
    throw Error(ErrorCode::kOutOfRange, "sparse matrix: row " + std::to_string(r) +
                                            " out of range");
  }
  return rows_[r];
}

std::vector<SparseEntry>& SparseRowMatrix::entries_of(Index r) {
  return const_cast<std::vector<SparseEntry>&>(std::as_const(*this).entries_of(r));
}

double SparseRowMatrix::get(Index r, Index c) const {
  const auto& entries = entries_of(r);
  auto it = find_col(entries, c);
  return (it != entries.end() && it->col == c) ? it->value : 0.0;
}

void SparseRowMatrix::set(Index r, Index c, double value) {
  if (c >= cols_) {
    throw Error(ErrorCode::kOutOfRange, "sparse matrix: column " +
                                            std::to_string(c) + " >= " +
                                            std::to_string(cols_));
  }
  if (value == 0.0) {
    erase(r, c);
    return;
  }
  check_value(value);
  auto& entries = entries_of(r);
  auto it = find_col(entries, c);
  if (it != entries.end() && it->col == c) {
    it->value = value;
  } else {
    entries.insert(it, SparseEntry{static_cast<std::uint32_t>(c), value});
    ++nnz_;
  }
}

bool SparseRowMatrix::erase(Index r, Index c) {
  auto& entries = entries_of(r);
  auto it = find_col(entries, c);
  if (it == entries.end() || it->col != c) return false;
  entries.erase(it);
  --nnz_;
  return true;
}

void SparseRowMatrix::set_row(Index r, std::vector<SparseEntry> entries) {
  auto& slot = entries_of(r);
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (entries[j].col >= cols_ || (j > 0 && entries[j].col <= entries[j - 1].col)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "set_row: columns must be strictly increasing and in range");
    }
    if (entries[j].value == 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "set_row: explicit zero");
    }
    check_value(entries[j].value);
  }
  nnz_ = nnz_ - slot.size() + entries.size();
  slot = std::move(entries);
}

void SparseRowMatrix::clear_row(Index r) {
  auto& slot = entries_of(r);
  nnz_ -= slot.size();
  slot.clear();
}

void SparseRowMatrix::add_columns(std::size_t n) {
  if (cols_ + n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kOutOfRange, "sparse matrix: too many columns");
  }
  cols_ += n;
}

std::vector<SparseColumn> SparseRowMatrix::take_trailing_columns(std::size_t n) {
  if (n > cols_) throw Error(ErrorCode::kOutOfRange, "take_trailing_columns");
  const std::size_t first = cols_ - n;
  std::vector<SparseColumn> out(n);
  for (Index r = 0; r < rows_.size(); ++r) {
    auto& entries = rows_[r];
    auto cut = find_col(entries, first);
    for (auto it = cut; it != entries.end(); ++it) {
      out[it->col - first].emplace_back(r, it->value);
    }
    nnz_ -= static_cast<std::size_t>(entries.end() - cut);
    entries.erase(cut, entries.end());
  }
  cols_ = first;
  return out;
}

void SparseRowMatrix::append_column(const SparseColumn& column) {
  for (const auto& [r, v] : column) {
    if (r >= rows_.size()) throw Error(ErrorCode::kOutOfRange, "append_column");
    if (v == 0.0) throw Error(ErrorCode::kInvalidArgument, "append_column: zero");
    check_value(v);
  }
  add_columns(1);
  const auto c = static_cast<std::uint32_t>(cols_ - 1);
  // The new column is the largest index, so it always goes at the row tail.
  for (const auto& [r, v] : column) {
    rows_[r].push_back(SparseEntry{c, v});
    ++nnz_;
  }
}

void SparseRowMatrix::set_nonneg(bool nonneg) {
  if (nonneg) {
    for (const auto& entries : rows_) {
      for (const auto& e : entries) {
        if (e.value < 0.0) {
          throw Error(ErrorCode::kInvalidArgument,
                      "set_nonneg: matrix holds negative entries");
        }
      }
    }
  }
  nonneg_ = nonneg;
}

void SparseRowMatrix::validate() const {
  std::size_t count = 0;
  for (const auto& entries : rows_) {
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const auto& e = entries[j];
      if (e.col >= cols_) throw Error(ErrorCode::kInvalidArgument, "column out of range");
      if (j > 0 && e.col <= entries[j - 1].col) {
        throw Error(ErrorCode::kInvalidArgument, "columns not strictly increasing");
      }
      if (e.value == 0.0 || !std::isfinite(e.value)) {
        throw Error(ErrorCode::kInvalidArgument, "stored zero or non-finite value");
      }
      if (nonneg_ && e.value < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "negative value in non-negative matrix");
      }
    }
    count += entries.size();
  }
  if (count != nnz_) throw Error(ErrorCode::kInvalidArgument, "nnz counter out of sync");
}

std::size_t nnz(const SparseRowMatrix& t) { return t.nnz(); }

void lookup_row_into(Index index, const SparseRowMatrix& t, const DenseMatrix& a,
                     std::span<double> out) {
  if (index >= t.rows()) {
    throw Error(ErrorCode::kOutOfRange, "lookup: row index " + std::to_string(index) +
                                            " >= " + std::to_string(t.rows()));
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : t.row(index)) {
    const auto anchor = a.row(e.col);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += e.value * anchor[j];
  }
}

DenseMatrix spmm(const SparseRowMatrix& t, const DenseMatrix& a) {
  if (t.cols() != a.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "spmm: T has " + std::to_string(t.cols()) + " columns, A has " +
                    std::to_string(a.rows()) + " rows");
  }
  DenseMatrix e(t.rows(), a.cols());
  for (Index i = 0; i < t.rows(); ++i) lookup_row_into(i, t, a, e.row(i));
  return e;
}

DenseMatrix lookup_rows(std::span<const Index> indices, const SparseRowMatrix& t,
                        const DenseMatrix& a) {
  if (t.cols() != a.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "lookup_rows: T/A shape mismatch");
  }
  DenseMatrix out(indices.size(), a.cols());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    lookup_row_into(indices[j], t, a, out.row(j));
  }
  return out;
}

}  // namespace ant
