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

#include "ant/persist.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

namespace ant {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written with native little-endian stores");

constexpr char kMagic[4] = {'A', 'N', 'T', 'B'};
constexpr std::uint32_t kFlagNonneg = 1U;

template <typename T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = 1U << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const auto len = static_cast<uInt>(std::min(kChunk, bytes.size() - off));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), len);
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffULL) {
    throw Error(ErrorCode::kOutOfRange, std::string("model file: ") + what + " exceeds u32");
  }
  return static_cast<std::uint32_t>(v);
}

[[noreturn]] void length_error(std::size_t got, std::size_t want) {
  throw Error(ErrorCode::kLengthMismatch, "model file: " + std::to_string(got) +
                                              " bytes, expected " + std::to_string(want));
}

}  // namespace

std::size_t model_file_size(std::size_t k, std::size_t d, std::size_t nnz) {
  return kModelHeaderBytes + 4 * k * d + 8 + 12 * nnz + 4;
}

std::string serialize_model(const AntModel& model) {
  model.validate();
  const std::size_t k = model.num_anchors();
  const std::size_t d = model.dim();
  std::string out;
  out.reserve(model_file_size(k, d, model.transform.nnz()));
  out.append(kMagic, 4);
  put<std::uint16_t>(out, kModelFileVersion);
  put<std::uint32_t>(out, checked_u32(model.vocab_size(), "|V|"));
  put<std::uint32_t>(out, checked_u32(k, "K"));
  put<std::uint32_t>(out, checked_u32(d, "d"));
  put<std::uint32_t>(out, model.transform.nonneg() ? kFlagNonneg : 0U);
  for (double x : model.anchors.values()) put<float>(out, static_cast<float>(x));

  const std::size_t nnz_pos = out.size();
  put<std::uint64_t>(out, 0);
  std::uint64_t written = 0;
  for (Index r = 0; r < model.vocab_size(); ++r) {
    for (const auto& e : model.transform.row(r)) {
      const auto v = static_cast<float>(e.value);
      if (v == 0.0F) continue;
      put<std::uint32_t>(out, static_cast<std::uint32_t>(r));
      put<std::uint32_t>(out, e.col);
      put<float>(out, v);
      ++written;
    }
  }
  std::memcpy(out.data() + nnz_pos, &written, sizeof(written));
  put<std::uint32_t>(out, crc_of(out));
  return out;
}

AntModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < 4) length_error(bytes.size(), kModelHeaderBytes);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "model file: bad magic");
  }
  if (bytes.size() < kModelHeaderBytes) length_error(bytes.size(), kModelHeaderBytes);
  Reader in(bytes.substr(4));
  const auto version = in.get<std::uint16_t>();
  if (version != kModelFileVersion) {
    throw Error(ErrorCode::kBadVersion,
                "model file: unsupported version " + std::to_string(version));
  }
  const std::size_t v = in.get<std::uint32_t>();
  const std::size_t k = in.get<std::uint32_t>();
  const std::size_t d = in.get<std::uint32_t>();
  const auto flags = in.get<std::uint32_t>();

  const std::size_t nnz_pos = kModelHeaderBytes + 4 * k * d;
  if (bytes.size() < nnz_pos + 8) length_error(bytes.size(), nnz_pos + 8);
  std::uint64_t nnz = 0;
  std::memcpy(&nnz, bytes.data() + nnz_pos, sizeof(nnz));
  if (nnz > bytes.size() / 12) length_error(bytes.size(), nnz_pos + 8);
  const std::size_t expected = model_file_size(k, d, static_cast<std::size_t>(nnz));
  if (bytes.size() != expected) length_error(bytes.size(), expected);

  std::uint32_t stored_crc = 0;
  std::memcpy(&stored_crc, bytes.data() + expected - 4, 4);
  if (crc_of(bytes.substr(0, expected - 4)) != stored_crc) {
    throw Error(ErrorCode::kBadChecksum, "model file: CRC mismatch");
  }
  if ((flags & ~kFlagNonneg) != 0) {
    throw Error(ErrorCode::kParse, "model file: unknown flag bits");
  }

  AntModel model;
  const bool nonneg = (flags & kFlagNonneg) != 0;
  model.reg.nonneg = nonneg;
  model.anchors = DenseMatrix(k, d);
  Reader body(bytes.substr(kModelHeaderBytes));
  for (double& x : model.anchors.values()) x = body.get<float>();
  body.get<std::uint64_t>();
  model.transform = SparseRowMatrix(v, k, nonneg);
  std::vector<SparseEntry> row;
  std::int64_t current = -1;
  std::uint32_t prev_row = 0;
  std::uint32_t prev_col = 0;
  auto flush = [&] {
    if (current >= 0) model.transform.set_row(static_cast<Index>(current), std::move(row));
    row.clear();
  };
  for (std::uint64_t i = 0; i < nnz; ++i) {
    const auto r = body.get<std::uint32_t>();
    const auto c = body.get<std::uint32_t>();
    const auto x = body.get<float>();
    if (r >= v || c >= k) throw Error(ErrorCode::kParse, "model file: record out of range");
    if (i > 0 && (r < prev_row || (r == prev_row && c <= prev_col))) {
      throw Error(ErrorCode::kParse, "model file: records not sorted by (row, col)");
    }
    if (x == 0.0F || !std::isfinite(x)) {
      throw Error(ErrorCode::kParse, "model file: zero or non-finite record value");
    }
    if (static_cast<std::int64_t>(r) != current) {
      flush();
      current = r;
    }
    row.push_back({c, static_cast<double>(x)});
    prev_row = r;
    prev_col = c;
  }
  flush();
  if (!model.anchors.all_finite()) throw Error(ErrorCode::kParse, "model file: non-finite A");
  model.validate();
  return model;
}

std::size_t save_model(const AntModel& model, const std::string& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
  return bytes.size();
}

AntModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "text_vectors") return ExportFormat::kTextVectors;
  if (name == "sparse_report") return ExportFormat::kSparseReport;
  throw Error(ErrorCode::kInvalidArgument, "unknown export format: " + std::string(name));
}

ExportSummary export_embeddings(const AntModel& model, std::span<const std::string> tokens,
                                std::ostream& out, ExportFormat format) {
  if (tokens.size() != model.vocab_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "export: one token per object required");
  }
  ExportSummary s;
  s.k = model.num_anchors();
  s.d = model.dim();
  s.params = count_params(model);
  std::vector<double> e(model.dim());
  char buf[32];
  for (Index i = 0; i < tokens.size(); ++i) {
    out << tokens[i];
    if (format == ExportFormat::kTextVectors) {
      lookup_row_into(i, model.transform, model.anchors, e);
      for (double x : e) {
        std::snprintf(buf, sizeof(buf), "%.6g", x);
        out << ' ' << buf;
      }
    } else {
      out << ' ' << model.transform.row(i).size();
    }
    out << '\n';
    ++s.lines;
  }
  if (format == ExportFormat::kSparseReport) {
    out << "totals K=" << s.k << " d=" << s.d << " nnz=" << s.params.transform_nnz
        << " total_params=" << s.params.total << " zero_rows=" << s.params.zero_rows << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "export: write failed");
  return s;
}

ExportSummary export_embeddings(const AntModel& model, std::span<const std::string> tokens,
                                const std::string& path, ExportFormat format) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return export_embeddings(model, tokens, out, format);
}

}  // namespace ant
