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

namespace annealvq {

/// Per-thread operation counters backing the performance contracts of the
/// encoder and the tree search. They only count when the library is built
/// with ANNEALVQ_OP_COUNTERS.
struct OpCounters {
  std::uint64_t codeword_distance_evals = 0;  // d-dimensional ‖x − c‖² evaluations
  std::uint64_t beam_scored_candidates = 0;
  std::uint64_t adc_table_lookups = 0;        // lookups made by node_distance
  std::uint64_t node_distance_calls = 0;
};

#if defined(ANNEALVQ_OP_COUNTERS)
inline constexpr bool kOpCountersEnabled = true;
#else
inline constexpr bool kOpCountersEnabled = false;
#endif

OpCounters& op_counters() noexcept;
void reset_op_counters() noexcept;

}  // namespace annealvq

#if defined(ANNEALVQ_OP_COUNTERS)
#define ANNEALVQ_COUNT(field, amount) (::annealvq::op_counters().field += (amount))
#else
#define ANNEALVQ_COUNT(field, amount) ((void)0)
#endif
