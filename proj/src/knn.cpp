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

#include "annealvq/knn.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "annealvq/adc.hpp"
#include "annealvq/errors.hpp"
#include "annealvq/parallel.hpp"
#include "distance_kernels.hpp"

namespace annealvq {

GroundTruth brute_force_knn(const VectorSet& base, const VectorSet& queries, std::size_t r,
                            std::size_t threads) {
  if (!queries.empty() && !base.empty() && base.dim() != queries.dim()) {
    throw InputError("brute_force_knn: base dimension " + std::to_string(base.dim()) +
                     " differs from query dimension " + std::to_string(queries.dim()));
  }
  if (r > base.size()) {
    throw InputError("brute_force_knn: r = " + std::to_string(r) + " exceeds base size " +
                     std::to_string(base.size()));
  }
  GroundTruth gt;
  gt.queries = queries.size();
  gt.depth = r;
  gt.ids.resize(gt.queries * r);
  gt.distances.resize(gt.queries * r);
  const std::size_t d = base.dim();

  parallel_for(queries.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<Neighbor> all(base.size());
    for (std::size_t q = begin; q < end; ++q) {
      const float* qv = queries.row(q).data();
      for (std::size_t i = 0; i < base.size(); ++i) {
        all[i] = {i, detail::squared_l2(qv, base.row(i).data(), d)};
      }
      std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(r), all.end(),
                        closer);
      for (std::size_t j = 0; j < r; ++j) {
        gt.ids[q * r + j] = all[j].id;
        gt.distances[q * r + j] = all[j].distance;
      }
    }
  });
  return gt;
}

}  // namespace annealvq
