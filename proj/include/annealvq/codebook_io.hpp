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

#include <filesystem>
#include <map>
#include <string>

#include "annealvq/codebook.hpp"

namespace annealvq {

// "HCLB" codebook file: magic, version u32, d/M/K u32, M·K·d f32
// (dictionary-major, codeword-major), then the M-entry order permutation.
// "HCLE" encoded file: magic, version u32, n u64, M u32, K u32, code width u8
// (1 when K ≤ 256, else 2), then n·M little-endian codes.
// All integers and floats are little-endian.

inline constexpr std::uint32_t kCodebookFormatVersion = 1;
inline constexpr std::uint32_t kEncodedFormatVersion = 1;

void write_codebook(const std::filesystem::path& path, const Codebook& codebook);
Codebook read_codebook(const std::filesystem::path& path);

void write_encoded(const std::filesystem::path& path, const EncodedDataset& codes);
EncodedDataset read_encoded(const std::filesystem::path& path);

/// Text sidecar of key=value lines, written next to binary artifacts.
void write_metadata(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_metadata(const std::filesystem::path& path);

}  // namespace annealvq
