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

#include "annealvq/vecs_io.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "annealvq/errors.hpp"
#include "binary_io.hpp"

namespace annealvq {
namespace {

std::string at(const std::filesystem::path& path, std::uint64_t offset) {
  return path.string() + ": byte offset " + std::to_string(offset);
}

std::int32_t checked_dim(std::int32_t d, std::size_t expected, const std::filesystem::path& path,
                         std::uint64_t offset) {
  if (d <= 0) {
    throw FormatError(at(path, offset) + ": invalid record dimension " + std::to_string(d));
  }
  if (expected != 0 && static_cast<std::size_t>(d) != expected) {
    throw FormatError(at(path, offset) + ": record dimension " + std::to_string(d) +
                      " differs from first record dimension " + std::to_string(expected));
  }
  return d;
}

template <typename Value>
VectorSet read_vecs(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  std::size_t d = 0;
  std::size_t n = 0;
  std::vector<float> values;
  std::vector<Value> record;
  while (in.remaining() > 0) {
    const std::uint64_t record_offset = in.offset();
    const auto dim = checked_dim(in.get<std::int32_t>("record header"), d, path, record_offset);
    if (d == 0) {
      d = static_cast<std::size_t>(dim);
      values.reserve(in.remaining() / (sizeof(Value) * d + 4) * d);
    }
    record.resize(d);
    in.get_span(std::span<Value>(record), "record payload");
    for (Value v : record) {
      const auto f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw FormatError(at(path, record_offset) + ": non-finite value in record");
      }
      values.push_back(f);
    }
    ++n;
  }
  return VectorSet(n, d, std::move(values));
}

}  // namespace

VectorSet read_fvecs(const std::filesystem::path& path) { return read_vecs<float>(path); }

VectorSet read_bvecs(const std::filesystem::path& path) { return read_vecs<std::uint8_t>(path); }

void write_fvecs(const std::filesystem::path& path, const VectorSet& set) {
  detail::BinaryWriter out(path);
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.put(static_cast<std::int32_t>(set.dim()));
    out.put_span(set.row(i));
  }
  out.close();
}

IntMatrix read_ivecs(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  IntMatrix m;
  while (in.remaining() > 0) {
    const std::uint64_t record_offset = in.offset();
    const auto dim = checked_dim(in.get<std::int32_t>("record header"), m.cols, path, record_offset);
    m.cols = static_cast<std::size_t>(dim);
    const std::size_t old = m.values.size();
    m.values.resize(old + m.cols);
    in.get_span(std::span<std::int32_t>(m.values.data() + old, m.cols), "record payload");
    ++m.rows;
  }
  return m;
}

void write_ivecs(const std::filesystem::path& path, const IntMatrix& rows) {
  if (rows.values.size() != rows.rows * rows.cols) {
    throw InputError("write_ivecs: matrix is not rectangular");
  }
  detail::BinaryWriter out(path);
  for (std::size_t r = 0; r < rows.rows; ++r) {
    out.put(static_cast<std::int32_t>(rows.cols));
    out.put_span(std::span<const std::int32_t>(rows.values.data() + r * rows.cols, rows.cols));
  }
  out.close();
}

IntMatrix to_int_matrix(const GroundTruth& gt) {
  IntMatrix m{gt.queries, gt.depth, {}};
  m.values.reserve(gt.ids.size());
  for (std::uint64_t id : gt.ids) {
    if (id > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
      throw InputError("ground truth id " + std::to_string(id) + " does not fit ivecs");
    }
    m.values.push_back(static_cast<std::int32_t>(id));
  }
  return m;
}

GroundTruth from_int_matrix(const IntMatrix& m) {
  GroundTruth gt;
  gt.queries = m.rows;
  gt.depth = m.cols;
  gt.ids.reserve(m.values.size());
  for (std::int32_t v : m.values) {
    if (v < 0) throw FormatError("negative id in ground truth");
    gt.ids.push_back(static_cast<std::uint64_t>(v));
  }
  return gt;
}

VecsReader::VecsReader(const std::filesystem::path& path, VecsKind kind)
    : path_(path), kind_(kind), in_(path, std::ios::binary) {
  if (!in_) throw InputError("cannot open " + path.string());
  in_.seekg(0, std::ios::end);
  file_size_ = static_cast<std::uint64_t>(in_.tellg());
  in_.seekg(0);
}

VectorSet VecsReader::next(std::size_t max_rows) {
  const std::size_t value_size = kind_ == VecsKind::kFloat ? 4 : 1;
  std::vector<float> values;
  std::vector<unsigned char> buffer;
  std::size_t rows = 0;
  while (rows < max_rows && offset_ < file_size_) {
    if (file_size_ - offset_ < 4) {
      throw FormatError(at(path_, offset_) + ": truncated record header");
    }
    unsigned char header[4];
    in_.read(reinterpret_cast<char*>(header), 4);
    std::int32_t raw;
    std::memcpy(&raw, header, 4);
    const auto d = checked_dim(detail::byteswap_if_big(raw), dim_, path_, offset_);
    dim_ = static_cast<std::size_t>(d);
    const std::uint64_t payload = static_cast<std::uint64_t>(dim_) * value_size;
    if (file_size_ - offset_ - 4 < payload) {
      throw FormatError(at(path_, offset_ + 4) + ": truncated record payload");
    }
    buffer.resize(payload);
    in_.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(payload));
    if (!in_) throw InputError("failed reading " + path_.string());
    for (std::size_t j = 0; j < dim_; ++j) {
      float f;
      if (kind_ == VecsKind::kFloat) {
        std::uint32_t bits;
        std::memcpy(&bits, buffer.data() + 4 * j, 4);
        bits = detail::byteswap_if_big(bits);
        std::memcpy(&f, &bits, 4);
      } else {
        f = static_cast<float>(buffer[j]);
      }
      if (!std::isfinite(f)) throw FormatError(at(path_, offset_) + ": non-finite value in record");
      values.push_back(f);
    }
    offset_ += 4 + payload;
    ++rows;
  }
  return VectorSet(rows, dim_, std::move(values));
}

}  // namespace annealvq
