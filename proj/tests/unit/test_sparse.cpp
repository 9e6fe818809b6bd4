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

#include "ant/random.hpp"
#include "ant/sparse_matrix.hpp"

namespace ant {
namespace {

// Dense oracle: materialize T, then multiply.
DenseMatrix dense_product(const SparseRowMatrix& t, const DenseMatrix& a) {
  DenseMatrix td(t.rows(), t.cols());
  for (Index r = 0; r < t.rows(); ++r) {
    for (const auto& e : t.row(r)) td(r, e.col) = e.value;
  }
  DenseMatrix out(t.rows(), a.cols());
  for (Index r = 0; r < t.rows(); ++r) {
    for (Index k = 0; k < t.cols(); ++k) {
      for (Index c = 0; c < a.cols(); ++c) out(r, c) += td(r, k) * a(k, c);
    }
  }
  return out;
}

SparseRowMatrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng) {
  SparseRowMatrix t(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (uniform01(rng) < density) t.set(r, c, standard_normal(rng));
    }
  }
  return t;
}

DenseMatrix random_dense(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix a(rows, cols);
  for (double& x : a.values()) x = standard_normal(rng);
  return a;
}

TEST(SparseMatrix, NnzCountsListedEntries) {
  SparseRowMatrix t(3, 3);
  t.set(1, 1, 0.5);
  t.set(2, 0, 1.0);
  t.set(2, 2, 0.25);
  EXPECT_EQ(nnz(t), 3u);
  EXPECT_EQ(nnz(SparseRowMatrix(4, 2)), 0u);
}

TEST(SparseMatrix, SetZeroErases) {
  SparseRowMatrix t(2, 3);
  t.set(0, 2, 1.5);
  t.set(0, 0, -2.0);
  EXPECT_EQ(t.nnz(), 2u);
  t.set(0, 2, 0.0);
  EXPECT_EQ(t.nnz(), 1u);
  EXPECT_EQ(t.get(0, 2), 0.0);
  EXPECT_TRUE(t.erase(0, 0));
  EXPECT_FALSE(t.erase(0, 0));
  EXPECT_EQ(t.nnz(), 0u);
  t.validate();
}

TEST(SparseMatrix, RowsStaySorted) {
  SparseRowMatrix t(1, 5);
  t.set(0, 4, 1.0);
  t.set(0, 1, 2.0);
  t.set(0, 3, 3.0);
  const auto row = t.row(0);
  ASSERT_EQ(row.size(), 3u);
  EXPECT_EQ(row[0].col, 1u);
  EXPECT_EQ(row[1].col, 3u);
  EXPECT_EQ(row[2].col, 4u);
}

TEST(SparseMatrix, NonnegRejectsNegative) {
  SparseRowMatrix t(1, 2, true);
  EXPECT_THROW(t.set(0, 0, -1.0), Error);
  t.set(0, 0, 1.0);
  EXPECT_EQ(t.get(0, 0), 1.0);
}

TEST(SparseMatrix, OutOfRangeThrows) {
  SparseRowMatrix t(2, 2);
  EXPECT_THROW(t.set(2, 0, 1.0), Error);
  EXPECT_THROW(t.set(0, 2, 1.0), Error);
}

TEST(SparseMatrix, UnsortedSetRowRejected) {
  SparseRowMatrix t(1, 4);
  EXPECT_THROW(t.set_row(0, {{2, 1.0}, {1, 1.0}}), Error);
  EXPECT_THROW(t.set_row(0, {{1, 1.0}, {1, 2.0}}), Error);
}

TEST(SparseMatrix, UpdateRowDropsZeros) {
  SparseRowMatrix t(1, 3);
  t.set_row(0, {{0, 0.1}, {1, 0.5}, {2, 0.05}});
  const std::size_t dropped =
      t.update_row(0, [](Index, double v) { return v > 0.2 ? v - 0.2 : 0.0; });
  EXPECT_EQ(dropped, 2u);
  EXPECT_EQ(t.nnz(), 1u);
  EXPECT_DOUBLE_EQ(t.get(0, 1), 0.3);
}

TEST(SparseMatrix, TrailingColumnRoundTrip) {
  Rng rng(3);
  SparseRowMatrix t = random_sparse(6, 5, 0.5, rng);
  const SparseRowMatrix before = t;
  auto cols = t.take_trailing_columns(2);
  EXPECT_EQ(t.cols(), 3u);
  t.validate();
  for (const auto& col : cols) t.append_column(col);
  EXPECT_EQ(t, before);
}

TEST(SparseMatrix, AddColumnsStartEmpty) {
  SparseRowMatrix t(2, 1);
  t.set(0, 0, 1.0);
  t.add_columns(2);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t.nnz(), 1u);
}

TEST(Spmm, HandExample) {
  SparseRowMatrix t(1, 3);
  t.set_row(0, {{0, 0.5}, {2, 0.25}});
  const auto a = DenseMatrix::from_rows({{2, 0}, {0, 2}, {4, 4}});
  const DenseMatrix e = spmm(t, a);
  EXPECT_DOUBLE_EQ(e(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(e(0, 1), 1.0);
}

TEST(Spmm, EmptyRowIsZero) {
  SparseRowMatrix t(2, 2);
  t.set(1, 0, 1.0);
  const DenseMatrix e = spmm(t, DenseMatrix::from_rows({{1, 2}, {3, 4}}));
  EXPECT_EQ(e(0, 0), 0.0);
  EXPECT_EQ(e(0, 1), 0.0);
}

TEST(Spmm, IdentityGivesA) {
  SparseRowMatrix t(3, 3);
  for (Index i = 0; i < 3; ++i) t.set(i, i, 1.0);
  const auto a = DenseMatrix::from_rows({{1, -2}, {3, 4}, {5, 6.5}});
  EXPECT_EQ(spmm(t, a), a);
}

TEST(Spmm, DimensionMismatchThrows) {
  SparseRowMatrix t(2, 3);
  EXPECT_THROW(spmm(t, DenseMatrix(2, 2)), Error);
}

TEST(Spmm, MatchesDenseOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseRowMatrix t = random_sparse(12, 7, 0.3, rng);
    const DenseMatrix a = random_dense(7, 5, rng);
    const DenseMatrix got = spmm(t, a);
    const DenseMatrix want = dense_product(t, a);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got.values()[i], want.values()[i], 1e-12);
    }
  }
}

TEST(Lookup, OneTermSum) {
  SparseRowMatrix t(3, 2);
  t.set(2, 1, 0.5);
  const auto a = DenseMatrix::from_rows({{9, 9}, {2, 2}});
  const std::vector<Index> idx{2};
  const DenseMatrix e = lookup_rows(idx, t, a);
  EXPECT_DOUBLE_EQ(e(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(e(0, 1), 1.0);
}

TEST(Lookup, RepeatedIndexGivesIdenticalRows) {
  Rng rng(5);
  const SparseRowMatrix t = random_sparse(4, 3, 0.6, rng);
  const DenseMatrix a = random_dense(3, 4, rng);
  const std::vector<Index> idx{0, 0};
  const DenseMatrix e = lookup_rows(idx, t, a);
  for (Index c = 0; c < 4; ++c) EXPECT_EQ(e(0, c), e(1, c));
}

TEST(Lookup, OutOfRangeThrows) {
  SparseRowMatrix t(2, 2);
  const std::vector<Index> idx{2};
  EXPECT_THROW(lookup_rows(idx, t, DenseMatrix(2, 3)), Error);
}

TEST(Lookup, AgreesWithSpmm) {
  Rng rng(17);
  const SparseRowMatrix t = random_sparse(30, 8, 0.25, rng);
  const DenseMatrix a = random_dense(8, 6, rng);
  std::vector<Index> idx(30);
  for (Index i = 0; i < 30; ++i) idx[i] = 29 - i;
  const DenseMatrix got = lookup_rows(idx, t, a);
  const DenseMatrix full = spmm(t, a);
  for (Index i = 0; i < 30; ++i) {
    for (Index c = 0; c < 6; ++c) EXPECT_EQ(got(i, c), full(idx[i], c));
  }
  std::vector<double> one(6);
  lookup_row_into(3, t, a, one);
  for (Index c = 0; c < 6; ++c) EXPECT_EQ(one[c], full(3, c));
}

}  // namespace
}  // namespace ant
