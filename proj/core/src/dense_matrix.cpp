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

#include "ant/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ant {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNumerical: return "numerical error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kBadVersion: return "bad version";
    case ErrorCode::kBadChecksum: return "bad checksum";
    case ErrorCode::kLengthMismatch: return "length mismatch";
  }
  return "unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dense matrix: value count " + std::to_string(values_.size()) +
                    " != " + std::to_string(rows_) + "x" +
                    std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch, "dense matrix: ragged rows");
    }
    values.insert(values.end(), r.begin(), r.end());
  }
  return DenseMatrix(rows.size(), cols, std::move(values));
}

void DenseMatrix::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool DenseMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void DenseMatrix::append_rows(const DenseMatrix& block) {
  if (block.rows_ == 0) return;
  if (rows_ == 0 && cols_ == 0) cols_ = block.cols_;
  if (block.cols_ != cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "append_rows: column mismatch");
  }
  values_.insert(values_.end(), block.values_.begin(), block.values_.end());
  rows_ += block.rows_;
}

DenseMatrix DenseMatrix::take_trailing_rows(std::size_t n) {
  if (n > rows_) throw Error(ErrorCode::kOutOfRange, "take_trailing_rows");
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>((rows_ - n) * cols_);
  DenseMatrix out(n, cols_, std::vector<double>(first, values_.end()));
  values_.erase(first, values_.end());
  rows_ -= n;
  return out;
}

void DenseMatrix::append_zero_cols(std::size_t n) {
  if (n == 0) return;
  std::vector<double> grown(rows_ * (cols_ + n), 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(r * cols_), cols_,
                grown.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + n)));
  }
  values_ = std::move(grown);
  cols_ += n;
}

void DenseMatrix::drop_trailing_cols(std::size_t n) {
  if (n > cols_) throw Error(ErrorCode::kOutOfRange, "drop_trailing_cols");
  if (n == 0) return;
  const std::size_t keep = cols_ - n;
  std::vector<double> shrunk(rows_ * keep);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(r * cols_), keep,
                shrunk.begin() + static_cast<std::ptrdiff_t>(r * keep));
  }
  values_ = std::move(shrunk);
  cols_ = keep;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dot: length mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace ant
