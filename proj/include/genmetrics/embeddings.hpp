// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "genmetrics/error.hpp"

namespace genmetrics {

using RowMatrixF =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n x d feature matrix with one sample id per row. Storage is 32-bit; every
// metric widens to 64-bit before arithmetic.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  EmbeddingMatrix(RowMatrixF values, std::vector<std::string> ids)
      : values_(std::move(values)), ids_(std::move(ids)) {
    if (ids_.size() != static_cast<std::size_t>(values_.rows())) {
      throw Error(ErrorCode::kIdCountMismatch,
                  std::to_string(values_.rows()) + " rows but " +
                      std::to_string(ids_.size()) + " ids");
    }
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], i).second) {
        throw Error(ErrorCode::kDuplicateSampleId, ids_[i]);
      }
    }
    if (!values_.allFinite()) {
      throw Error(ErrorCode::kNonFiniteInput, "embedding contains NaN or Inf");
    }
  }

  // Convenience for tests and tools: ids default to "0", "1", ...
  static EmbeddingMatrix FromDouble(const Eigen::MatrixXd& values,
                                    std::vector<std::string> ids = {}) {
    if (ids.empty()) {
      for (Eigen::Index i = 0; i < values.rows(); ++i) {
        ids.push_back(std::to_string(i));
      }
    }
    return EmbeddingMatrix(values.cast<float>(), std::move(ids));
  }

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values_.cols()); }
  const RowMatrixF& values() const { return values_; }
  const std::vector<std::string>& ids() const { return ids_; }

  std::span<const float> Row(std::size_t i) const {
    return {values_.data() + i * dim(), dim()};
  }

  std::optional<std::size_t> IndexOf(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Eigen::MatrixXd ToDouble() const { return values_.cast<double>(); }

  EmbeddingMatrix SelectRows(std::span<const std::size_t> rows) const {
    RowMatrixF out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    std::vector<std::string> out_ids;
    out_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.row(static_cast<Eigen::Index>(r)) =
          values_.row(static_cast<Eigen::Index>(rows[r]));
      out_ids.push_back(ids_[rows[r]]);
    }
    return EmbeddingMatrix(std::move(out), std::move(out_ids));
  }

 private:
  RowMatrixF values_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

// CXGB container, all integers little-endian:
//   "CXGB" | u32 version (=1) | u64 n | u64 d | n*d f32 row-major |
//   n x (u16 byte length + UTF-8 id)
inline constexpr std::string_view kCxgbMagic = "CXGB";
inline constexpr std::uint32_t kCxgbVersion = 1;
inline constexpr std::size_t kCxgbHeaderBytes = 4 + 4 + 8 + 8;

namespace cxgb_internal {

template <typename T>
void PutLe(std::string& out, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>((value >> (8 * b)) & 0xFF));
  }
}

template <typename T>
T GetLe(const unsigned char* p) {
  T value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    value |= static_cast<T>(static_cast<T>(p[b]) << (8 * b));
  }
  return value;
}

}  // namespace cxgb_internal

inline std::string EncodeEmbeddings(const EmbeddingMatrix& m) {
  using cxgb_internal::PutLe;
  std::string out;
  out.reserve(kCxgbHeaderBytes + m.rows() * m.dim() * 4 + m.rows() * 16);
  out.append(kCxgbMagic);
  PutLe<std::uint32_t>(out, kCxgbVersion);
  PutLe<std::uint64_t>(out, m.rows());
  PutLe<std::uint64_t>(out, m.dim());
  const float* data = m.values().data();
  const std::size_t count = m.rows() * m.dim();
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(data), count * sizeof(float));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(data[i]));
    }
  }
  for (const auto& id : m.ids()) {
    if (id.size() > 0xFFFF) {
      throw Error(ErrorCode::kBadValue, "sample id longer than 65535 bytes");
    }
    PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.append(id);
  }
  return out;
}

inline EmbeddingMatrix DecodeEmbeddings(std::string_view bytes,
                                        const std::string& source = {}) {
  using cxgb_internal::GetLe;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 4 || bytes.substr(0, 4) != kCxgbMagic) {
    throw Error(ErrorCode::kBadMagic, "missing CXGB magic", source);
  }
  if (size < kCxgbHeaderBytes) {
    throw Error(ErrorCode::kTruncatedFile, "header incomplete", source);
  }
  const auto version = GetLe<std::uint32_t>(p + 4);
  if (version != kCxgbVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "version " + std::to_string(version), source);
  }
  const auto n = GetLe<std::uint64_t>(p + 8);
  const auto d = GetLe<std::uint64_t>(p + 16);
  std::size_t offset = kCxgbHeaderBytes;
  const std::size_t available = (size - offset) / sizeof(float);
  if ((d != 0 && n > available / d) || n * d > available) {
    throw Error(ErrorCode::kTruncatedFile,
                "value block shorter than n*d floats", source);
  }
  RowMatrixF values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const std::size_t count = n * d;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(values.data(), p + offset, count * sizeof(float));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      values.data()[i] =
          std::bit_cast<float>(GetLe<std::uint32_t>(p + offset + 4 * i));
    }
  }
  offset += count * sizeof(float);

  std::vector<std::string> ids;
  ids.reserve(n);
  while (ids.size() < n) {
    if (offset == size) {
      throw Error(ErrorCode::kIdCountMismatch,
                  "header declares " + std::to_string(n) + " rows, found " +
                      std::to_string(ids.size()) + " ids",
                  source);
    }
    if (size - offset < 2) {
      throw Error(ErrorCode::kTruncatedFile, "id length cut short", source);
    }
    const auto length = GetLe<std::uint16_t>(p + offset);
    offset += 2;
    if (size - offset < length) {
      throw Error(ErrorCode::kTruncatedFile, "id bytes cut short", source);
    }
    ids.emplace_back(bytes.substr(offset, length));
    offset += length;
  }
  if (offset != size) {
    throw Error(ErrorCode::kIdCountMismatch,
                "trailing bytes after " + std::to_string(n) + " ids", source);
  }
  try {
    return EmbeddingMatrix(std::move(values), std::move(ids));
  } catch (const Error& e) {
    throw e.WithContext(source);
  }
}

inline EmbeddingMatrix ReadEmbeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open file", path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodeEmbeddings(bytes, path);
}

inline void WriteEmbeddings(const EmbeddingMatrix& m, const std::string& path) {
  const std::string bytes = EncodeEmbeddings(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create file", path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed", path);
}

}  // namespace genmetrics
