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

#ifndef ANT_SPARSE_MATRIX_HPP
#define ANT_SPARSE_MATRIX_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ant/dense_matrix.hpp"
#include "ant/error.hpp"

namespace ant {

struct SparseEntry {
  std::uint32_t col;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// One removed column: the (row, value) pairs it held, ascending by row.
using SparseColumn = std::vector<std::pair<Index, double>>;

/// Row-sliced sparse matrix (adjacency-list layout). Each row keeps its
/// entries sorted by column so that inserting or deleting a nonzero is a
/// local operation on that row, and row lookups are a single slice.
///
/// Invariants: column indices strictly increase within a row and are below
/// cols(); no stored value is zero; with nonneg() every stored value is
/// positive; nnz() equals the number of stored entries.
///
/// Concurrent readers are fine; any mutation needs exclusive access.
class SparseRowMatrix {
 public:
  SparseRowMatrix() = default;
  SparseRowMatrix(std::size_t rows, std::size_t cols, bool nonneg = false);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  bool nonneg() const noexcept { return nonneg_; }
  std::size_t nnz() const noexcept { return nnz_; }

  std::span<const SparseEntry> row(Index r) const { return entries_of(r); }

  /// Stored value at (r, c), or 0 when absent.
  double get(Index r, Index c) const;

  /// Inserts or overwrites (r, c). Setting zero removes the entry.
  void set(Index r, Index c, double value);

  /// Removes (r, c); returns whether an entry was present.
  bool erase(Index r, Index c);

  /// Replaces a whole row. Entries must be strictly sorted by column.
  void set_row(Index r, std::vector<SparseEntry> entries);
  void clear_row(Index r);

  /// Rewrites each stored value of row r through `fn(col, value)` and drops
  /// entries that come back exactly zero. Returns the number dropped.
  template <typename Fn>
  std::size_t update_row(Index r, Fn&& fn);

  /// Grows the column count; new columns start empty.
  void add_columns(std::size_t n);
  /// Removes the trailing `n` columns and returns their contents, ordered
  /// first-to-last column.
  std::vector<SparseColumn> take_trailing_columns(std::size_t n);
  /// Appends one column holding `column`'s entries.
  void append_column(const SparseColumn& column);

  /// Toggling nonneg on requires every stored value to be positive.
  void set_nonneg(bool nonneg);

  /// Throws kInvalidArgument if any invariant is broken.
  void validate() const;

  friend bool operator==(const SparseRowMatrix&, const SparseRowMatrix&) = default;

 private:
  void check_value(double value) const;
  /// Throws kOutOfRange for r >= rows().
  const std::vector<SparseEntry>& entries_of(Index r) const;
  std::vector<SparseEntry>& entries_of(Index r);

  std::size_t cols_ = 0;
  bool nonneg_ = false;
  std::size_t nnz_ = 0;
  std::vector<std::vector<SparseEntry>> rows_;
};

template <typename Fn>
std::size_t SparseRowMatrix::update_row(Index r, Fn&& fn) {
  auto& entries = entries_of(r);
  std::size_t kept = 0;
  for (auto& e : entries) {
    const double v = fn(static_cast<Index>(e.col), e.value);
    if (v == 0.0) continue;
    check_value(v);
    entries[kept++] = SparseEntry{e.col, v};
  }
  const std::size_t dropped = entries.size() - kept;
  entries.resize(kept);
  nnz_ -= dropped;
  return dropped;
}

std::size_t nnz(const SparseRowMatrix& t);

/// Materializes E = T * A. Row i of E sums w * A[k] over row i of T in
/// ascending column order.
DenseMatrix spmm(const SparseRowMatrix& t, const DenseMatrix& a);

/// Rows of T * A for the requested indices without forming E: each output
/// row is (x_i T) A, computed with the same summation order as spmm().
DenseMatrix lookup_rows(std::span<const Index> indices, const SparseRowMatrix& t,
                        const DenseMatrix& a);

/// Single-row form of lookup_rows() writing into `out` (length A.cols()).
void lookup_row_into(Index index, const SparseRowMatrix& t, const DenseMatrix& a,
                     std::span<double> out);

}  // namespace ant

#endif  // ANT_SPARSE_MATRIX_HPP
