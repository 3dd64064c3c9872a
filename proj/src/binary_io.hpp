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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "annealvq/errors.hpp"

namespace annealvq::detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T byteswap_if_big(T value) noexcept {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

/// Buffered little-endian writer; throws InputError naming the path on failure.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw InputError("cannot open " + path.string() + " for writing");
  }

  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    value = byteswap_if_big(value);
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
    check();
  }

  template <typename T>
  void put_span(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
      out_.write(reinterpret_cast<const char*>(values.data()),
                 static_cast<std::streamsize>(values.size_bytes()));
      check();
    } else {
      for (T v : values) put(v);
    }
  }

  void put_bytes(std::string_view bytes) {
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    check();
  }

  void close() {
    out_.close();
    if (out_.fail()) throw InputError("failed writing " + path_.string());
  }

 private:
  void check() {
    if (!out_) throw InputError("failed writing " + path_.string());
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

/// Whole-file little-endian reader with byte-offset aware errors.
class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    bytes_.resize(size);
    in.read(reinterpret_cast<char*>(bytes_.data()), static_cast<std::streamsize>(size));
    if (!in) throw InputError("failed reading " + path.string());
  }

  std::size_t offset() const noexcept { return offset_; }
  std::size_t remaining() const noexcept { return bytes_.size() - offset_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  void expect_magic(std::string_view magic) {
    if (remaining() < magic.size() ||
        std::memcmp(bytes_.data() + offset_, magic.data(), magic.size()) != 0) {
      throw InputError(path_.string() + ": bad magic, expected \"" + std::string(magic) + "\"");
    }
    offset_ += magic.size();
  }

  template <typename T>
  T get(std::string_view what) {
    static_assert(std::is_trivially_copyable_v<T>);
    require(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return byteswap_if_big(value);
  }

  template <typename T>
  void get_span(std::span<T> out, std::string_view what) {
    require(out.size_bytes(), what);
    std::memcpy(out.data(), bytes_.data() + offset_, out.size_bytes());
    offset_ += out.size_bytes();
    if constexpr (std::endian::native == std::endian::big) {
      for (T& v : out) v = byteswap_if_big(v);
    }
  }

  void require(std::size_t count, std::string_view what) const {
    if (remaining() < count) {
      throw FormatError(path_.string() + ": truncated " + std::string(what) + " at byte offset " +
                        std::to_string(offset_));
    }
  }

  void expect_end() const {
    if (remaining() != 0) {
      throw FormatError(path_.string() + ": " + std::to_string(remaining()) +
                        " trailing bytes at byte offset " + std::to_string(offset_));
    }
  }

 private:
  std::filesystem::path path_;
  std::vector<unsigned char> bytes_;
  std::size_t offset_ = 0;
};

}  // namespace annealvq::detail
