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
#include <functional>

namespace annealvq {

/// Number of workers to use for a requested count (0 = hardware concurrency).
std::size_t resolve_threads(std::size_t requested) noexcept;

/// Splits [0, n) into one contiguous chunk per worker and runs
/// fn(worker, begin, end) on each. Chunk boundaries depend only on n and the
/// worker count, so per-worker partial results can be combined in worker
/// order for reproducible reductions.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace annealvq
