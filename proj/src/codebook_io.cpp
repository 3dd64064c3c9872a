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

#include "annealvq/codebook_io.hpp"

#include <fstream>
#include <limits>
#include <string>

#include "annealvq/errors.hpp"
#include "binary_io.hpp"

namespace annealvq {
namespace {

constexpr std::string_view kCodebookMagic = "HCLB";
constexpr std::string_view kEncodedMagic = "HCLE";

void check_version(detail::BinaryReader& in, std::uint32_t expected) {
  const auto version = in.get<std::uint32_t>("format version");
  if (version != expected) {
    throw InputError(in.path().string() + ": unsupported format version " +
                     std::to_string(version) + " (expected " + std::to_string(expected) + ")");
  }
}

// Rejects products that would not fit the remaining payload before allocating.
std::size_t checked_count(detail::BinaryReader& in, std::initializer_list<std::uint64_t> factors,
                          std::size_t unit, std::string_view what) {
  std::uint64_t total = 1;
  for (std::uint64_t f : factors) {
    if (f != 0 && total > std::numeric_limits<std::uint64_t>::max() / f) {
      in.require(std::numeric_limits<std::size_t>::max(), what);
    }
    total *= f;
  }
  if (total > in.remaining() / unit) in.require(in.remaining() + 1, what);
  return static_cast<std::size_t>(total);
}

std::uint8_t code_width(std::size_t k_count) { return k_count <= 256 ? 1 : 2; }

}  // namespace

void write_codebook(const std::filesystem::path& path, const Codebook& codebook) {
  detail::BinaryWriter out(path);
  out.put_bytes(kCodebookMagic);
  out.put<std::uint32_t>(kCodebookFormatVersion);
  out.put(static_cast<std::uint32_t>(codebook.dim()));
  out.put(static_cast<std::uint32_t>(codebook.m_count()));
  out.put(static_cast<std::uint32_t>(codebook.k_count()));
  out.put_span(std::span<const float>(codebook.codewords()));
  out.put_span(std::span<const std::uint32_t>(codebook.order()));
  out.close();
}

Codebook read_codebook(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kCodebookMagic);
  check_version(in, kCodebookFormatVersion);
  const auto d = in.get<std::uint32_t>("dimension");
  const auto m = in.get<std::uint32_t>("dictionary count");
  const auto k = in.get<std::uint32_t>("codeword count");
  if (d == 0 || m == 0 || k == 0 || k > 65536) {
    throw FormatError(path.string() + ": invalid codebook shape d=" + std::to_string(d) +
                      " M=" + std::to_string(m) + " K=" + std::to_string(k));
  }
  std::vector<float> codewords(checked_count(in, {m, k, d}, sizeof(float), "codewords"));
  in.get_span(std::span<float>(codewords), "codewords");
  std::vector<std::uint32_t> order(m);
  in.get_span(std::span<std::uint32_t>(order), "dictionary order");
  in.expect_end();
  try {
    return Codebook(d, m, k, std::move(codewords), std::move(order));
  } catch (const InputError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_encoded(const std::filesystem::path& path, const EncodedDataset& codes) {
  if (!codes.id_map().empty()) {
    throw InputError("write_encoded: the encoded format does not carry an id map");
  }
  detail::BinaryWriter out(path);
  out.put_bytes(kEncodedMagic);
  out.put<std::uint32_t>(kEncodedFormatVersion);
  out.put(static_cast<std::uint64_t>(codes.size()));
  out.put(static_cast<std::uint32_t>(codes.m_count()));
  out.put(static_cast<std::uint32_t>(codes.k_count()));
  const std::uint8_t width = code_width(codes.k_count());
  out.put(width);
  if (width == 1) {
    std::vector<std::uint8_t> packed(codes.codes().begin(), codes.codes().end());
    out.put_span(std::span<const std::uint8_t>(packed));
  } else {
    out.put_span(std::span<const Code>(codes.codes()));
  }
  out.close();
}

EncodedDataset read_encoded(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kEncodedMagic);
  check_version(in, kEncodedFormatVersion);
  const auto n = in.get<std::uint64_t>("row count");
  const auto m = in.get<std::uint32_t>("dictionary count");
  const auto k = in.get<std::uint32_t>("codeword count");
  const auto width = in.get<std::uint8_t>("code width");
  if (m == 0 || k == 0 || k > 65536) {
    throw FormatError(path.string() + ": invalid code shape M=" + std::to_string(m) +
                      " K=" + std::to_string(k));
  }
  if (width != code_width(k)) {
    throw FormatError(path.string() + ": code width " + std::to_string(width) +
                      " does not match K=" + std::to_string(k));
  }
  const std::size_t count = checked_count(in, {n, m}, width, "codes");
  std::vector<Code> codes(count);
  if (width == 1) {
    std::vector<std::uint8_t> packed(count);
    in.get_span(std::span<std::uint8_t>(packed), "codes");
    std::copy(packed.begin(), packed.end(), codes.begin());
  } else {
    in.get_span(std::span<Code>(codes), "codes");
  }
  in.expect_end();
  for (std::size_t i = 0; i < count; ++i) {
    if (codes[i] >= k) {
      throw FormatError(path.string() + ": code " + std::to_string(codes[i]) + " at row " +
                        std::to_string(i / m) + " is out of range for K=" + std::to_string(k));
    }
  }
  return EncodedDataset(static_cast<std::size_t>(n), m, k, std::move(codes));
}

void write_metadata(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  for (const auto& [key, value] : entries) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw InputError("metadata entry '" + key + "' cannot be written as key=value");
    }
    out << key << '=' << value << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

std::map<std::string, std::string> read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    entries[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return entries;
}

}  // namespace annealvq
