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

#include <cstddef>

#include "annealvq/vector_set.hpp"

namespace annealvq {

/// Exact top-r neighbours of every query by squared L2, ties to the lower id.
/// threads = 0 uses every available core; results do not depend on it.
GroundTruth brute_force_knn(const VectorSet& base, const VectorSet& queries, std::size_t r,
                            std::size_t threads = 1);

}  // namespace annealvq
