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

#include "annealvq/atree.hpp"

namespace annealvq {

// "HCLT" tree file: magic, version u32, codebook fingerprint (32 bytes),
// M u32, K u32, then u64 counts (ids, nodes, leaves, internal nodes), then a
// preorder node stream. The root record is its child count (u32); every
// other node is code u16, ε f32, child count u32, and leaves (child count 0)
// follow with M − depth suffix steps (code u16, ε f32), an id count u64 and
// the ids as u64.

inline constexpr std::uint32_t kTreeFormatVersion = 1;

void serialize_atree(const ATree& tree, const std::filesystem::path& path);
ATree deserialize_atree(const std::filesystem::path& path);

}  // namespace annealvq
