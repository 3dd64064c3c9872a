// Copyright 2026 The annealvq Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "annealvq/vector_set.hpp"

namespace annealvq {

// The *vecs formats are sequences of records [d: i32 LE][d values], where a
// value is a little-endian f32 (fvecs), a u8 (bvecs) or an i32 (ivecs).

VectorSet read_fvecs(const std::filesystem::path& path);
VectorSet read_bvecs(const std::filesystem::path& path);
void write_fvecs(const std::filesystem::path& path, const VectorSet& set);

/// Rectangular integer matrix as read from / written to ivecs.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> values;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

IntMatrix read_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::filesystem::path& path, const IntMatrix& rows);

/// Ground truth ids as an ivecs matrix and back.
IntMatrix to_int_matrix(const GroundTruth& gt);
GroundTruth from_int_matrix(const IntMatrix& m);

enum class VecsKind { kFloat, kByte };

/// Sequential chunked reader for large fvecs/bvecs files.
class VecsReader {
 public:
  VecsReader(const std::filesystem::path& path, VecsKind kind);

  /// Next up to max_rows records; an empty set signals end of file.
  VectorSet next(std::size_t max_rows);

  std::size_t dim() const noexcept { return dim_; }

 private:
  std::filesystem::path path_;
  VecsKind kind_;
  std::ifstream in_;
  std::uint64_t offset_ = 0;
  std::uint64_t file_size_ = 0;
  std::size_t dim_ = 0;
};

}  // namespace annealvq
