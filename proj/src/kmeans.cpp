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

#include "annealvq/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "annealvq/errors.hpp"
#include "annealvq/parallel.hpp"
#include "annealvq/pca.hpp"
#include "distance_kernels.hpp"

namespace annealvq {
namespace {

double squared_l2_mixed(const float* x, const double* c, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double diff = static_cast<double>(x[j]) - c[j];
    acc += diff * diff;
  }
  return acc;
}

class LloydState {
 public:
  LloydState(const VectorSet& data, const Centroids& init, std::size_t active, std::size_t threads)
      : data_(data), k_(init.k), d_(data.dim()), active_(active), threads_(threads),
        centroids_(init.values.begin(), init.values.end()), assignment_(data.size(), 0),
        errors_(data.size(), 0.0) {}

  // Nearest centroid over the active dims; returns whether any point moved.
  bool assign(bool first) {
    std::vector<char> moved(data_.size(), 0);
    parallel_for(data_.size(), threads_, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const float* x = data_.row(i).data();
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k_; ++j) {
          const double dist = squared_l2_mixed(x, centroids_.data() + j * d_, active_);
          if (dist < best_d) {
            best_d = dist;
            best = static_cast<std::uint32_t>(j);
          }
        }
        moved[i] = first || best != assignment_[i];
        assignment_[i] = best;
        errors_[i] = best_d;
      }
    });
    return std::any_of(moved.begin(), moved.end(), [](char c) { return c != 0; });
  }

  double objective() const {
    double total = 0.0;
    for (double e : errors_) total += e;
    return total;
  }

  // Empty clusters take over the worst-fitted point of a cluster that keeps
  // at least one other member.
  void repair_empty() {
    std::vector<std::size_t> counts(k_, 0);
    for (std::uint32_t a : assignment_) ++counts[a];
    for (std::size_t j = 0; j < k_; ++j) {
      if (counts[j] != 0) continue;
      std::size_t pick = data_.size();
      double worst = -1.0;
      for (std::size_t i = 0; i < data_.size(); ++i) {
        if (counts[assignment_[i]] >= 2 && errors_[i] > worst) {
          worst = errors_[i];
          pick = i;
        }
      }
      if (pick == data_.size()) break;
      --counts[assignment_[pick]];
      assignment_[pick] = static_cast<std::uint32_t>(j);
      counts[j] = 1;
      errors_[pick] = 0.0;
      const auto x = data_.row(pick);
      std::copy(x.begin(), x.end(), centroids_.begin() + static_cast<std::ptrdiff_t>(j * d_));
    }
  }

  // Every coordinate, active or not, becomes the mean of the assigned points.
  void update() {
    std::vector<double> sums(k_ * d_, 0.0);
    std::vector<std::size_t> counts(k_, 0);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto x = data_.row(i);
      double* s = sums.data() + assignment_[i] * d_;
      for (std::size_t j = 0; j < d_; ++j) s[j] += x[j];
      ++counts[assignment_[i]];
    }
    for (std::size_t c = 0; c < k_; ++c) {
      if (counts[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t j = 0; j < d_; ++j) centroids_[c * d_ + j] = sums[c * d_ + j] * inv;
    }
  }

  Centroids result(std::vector<double> trace) const {
    Centroids out(k_, d_);
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
      out.values[i] = static_cast<float>(centroids_[i]);
    }
    out.assignment = assignment_;
    out.objective = trace.back();
    out.objective_trace = std::move(trace);
    return out;
  }

 private:
  const VectorSet& data_;
  std::size_t k_;
  std::size_t d_;
  std::size_t active_;
  std::size_t threads_;
  std::vector<double> centroids_;
  std::vector<std::uint32_t> assignment_;
  std::vector<double> errors_;
};

void check_shapes(const VectorSet& data, const Centroids& init) {
  if (init.k == 0 || init.values.size() != init.k * init.dim) {
    throw InputError("k-means: malformed initial centroids");
  }
  if (init.dim != data.dim()) {
    throw InputError("k-means: centroid dimension " + std::to_string(init.dim) +
                     " differs from data dimension " + std::to_string(data.dim()));
  }
  if (init.k > data.size()) {
    throw InputError("k-means: k = " + std::to_string(init.k) + " exceeds n = " +
                     std::to_string(data.size()));
  }
}

}  // namespace

DimensionSchedule dimension_schedule(std::size_t d, std::size_t stages) {
  if (d == 0 || stages == 0) throw InputError("dimension_schedule: d and stages must be >= 1");
  DimensionSchedule schedule;
  for (std::size_t i = 1; i <= stages; ++i) {
    double v = std::pow(static_cast<double>(d), static_cast<double>(i) / static_cast<double>(stages));
    const double nearest = std::round(v);
    if (std::abs(v - nearest) < 1e-9) v = nearest;
    const auto dims = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(v)), 1, d);
    if (schedule.dims.empty() || dims > schedule.dims.back()) schedule.dims.push_back(dims);
  }
  if (schedule.dims.back() != d) schedule.dims.push_back(d);
  return schedule;
}

Centroids lloyd_kmeans(const VectorSet& data, const Centroids& init, std::size_t active_dims,
                       const KMeansOptions& options) {
  check_shapes(data, init);
  if (active_dims == 0 || active_dims > data.dim()) {
    throw InputError("lloyd_kmeans: active_dims must be in [1, d]");
  }
  LloydState state(data, init, active_dims, options.threads);
  std::vector<double> trace;
  state.assign(true);
  trace.push_back(state.objective());
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    state.repair_empty();
    state.update();
    const bool moved = state.assign(false);
    trace.push_back(state.objective());
    if (!moved) break;
  }
  return state.result(std::move(trace));
}

Centroids assign_full(const VectorSet& data, const Centroids& centroids, std::size_t threads) {
  if (centroids.dim != data.dim()) throw InputError("assign_full: dimension mismatch");
  Centroids out = centroids;
  out.assignment.assign(data.size(), 0);
  std::vector<double> errors(data.size(), 0.0);
  parallel_for(data.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const float* x = data.row(i).data();
      double best_d = std::numeric_limits<double>::infinity();
      std::uint32_t best = 0;
      for (std::size_t j = 0; j < centroids.k; ++j) {
        const double dist = detail::squared_l2(x, centroids.centroid(j).data(), data.dim());
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<std::uint32_t>(j);
        }
      }
      out.assignment[i] = best;
      errors[i] = best_d;
    }
  });
  out.objective = 0.0;
  for (double e : errors) out.objective += e;
  out.objective_trace = {out.objective};
  return out;
}

Centroids improved_kmeans(const VectorSet& data, const Centroids& init,
                          const DimensionSchedule& schedule, const KMeansOptions& options) {
  check_shapes(data, init);
  if (schedule.dims.empty() || schedule.dims.back() != data.dim()) {
    throw InputError("improved_kmeans: schedule must end at the data dimension");
  }
  const Centroids baseline = assign_full(data, init, options.threads);
  if (data.size() < 2) return baseline;

  const PcaModel pca = pca_fit(data);
  const VectorSet rotated = pca.rotate(data);
  Centroids current(init.k, init.dim);
  for (std::size_t j = 0; j < init.k; ++j) pca.rotate(init.centroid(j), current.centroid(j));

  std::vector<double> trace;
  for (std::size_t dims : schedule.dims) {
    current = lloyd_kmeans(rotated, current, dims, options);
    trace.insert(trace.end(), current.objective_trace.begin(), current.objective_trace.end());
  }

  Centroids back(init.k, init.dim);
  for (std::size_t j = 0; j < init.k; ++j) pca.unrotate(current.centroid(j), back.centroid(j));
  Centroids result = assign_full(data, back, options.threads);

  // The low-dimensional stages can leave a worse full-dimensional optimum than
  // the start; plain Lloyd from init is monotone, so fall back to it.
  if (result.objective > baseline.objective) {
    result = assign_full(data, lloyd_kmeans(data, init, data.dim(), options), options.threads);
    if (result.objective > baseline.objective) result = baseline;
  }
  trace.push_back(result.objective);
  result.objective_trace = std::move(trace);
  return result;
}

}  // namespace annealvq
