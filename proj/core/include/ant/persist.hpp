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

#ifndef ANT_PERSIST_HPP
#define ANT_PERSIST_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "ant/model.hpp"

namespace ant {

// Binary layout, all integers little-endian:
//   "ANTB" | u16 version | u32 |V| | u32 K | u32 d | u32 flags
//   K*d binary32 values of A, row-major
//   u64 nnz | nnz records (u32 row, u32 col, binary32 value) sorted by (row, col)
//   u32 CRC-32 of every preceding byte
// flags bit 0: T is non-negative. Other bits are reserved and must be zero.

inline constexpr std::uint16_t kModelFileVersion = 1;
inline constexpr std::size_t kModelHeaderBytes = 22;

/// 22 + 4Kd + 8 + 12 nnz + 4.
std::size_t model_file_size(std::size_t k, std::size_t d, std::size_t nnz);

/// Entries whose binary32 rounding is zero are not written.
std::string serialize_model(const AntModel& model);

/// Throws kLengthMismatch, kBadMagic, kBadVersion, kBadChecksum or kParse.
AntModel deserialize_model(std::string_view bytes);

/// Returns the number of bytes written.
std::size_t save_model(const AntModel& model, const std::string& path);
AntModel load_model(const std::string& path);

enum class ExportFormat { kTextVectors, kSparseReport };

ExportFormat parse_export_format(std::string_view name);

struct ExportSummary {
  std::size_t lines = 0;  // object lines written
  std::size_t k = 0;
  std::size_t d = 0;
  ParamCount params;
};

/// kTextVectors: "<token> v1 ... vd" per object with 6 significant digits.
/// kSparseReport: "<token> <nnz of row>" per object, then one line
/// "totals K=<k> d=<d> nnz=<n> total_params=<p> zero_rows=<z>".
ExportSummary export_embeddings(const AntModel& model, std::span<const std::string> tokens,
                                std::ostream& out, ExportFormat format);
ExportSummary export_embeddings(const AntModel& model, std::span<const std::string> tokens,
                                const std::string& path, ExportFormat format);

}  // namespace ant

#endif  // ANT_PERSIST_HPP
