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

#include "annealvq/annealing.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "annealvq/encoding.hpp"
#include "annealvq/errors.hpp"
#include "annealvq/parallel.hpp"

namespace annealvq {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_consistent(const VectorSet& data, const Codebook& codebook, const EncodedDataset& codes) {
  if (data.size() != codes.size()) {
    throw InputError("training: " + std::to_string(data.size()) + " vectors but " +
                     std::to_string(codes.size()) + " codes");
  }
  if (data.dim() != codebook.dim()) {
    throw InputError("training: data dimension " + std::to_string(data.dim()) +
                     " differs from codebook dimension " + std::to_string(codebook.dim()));
  }
  if (codes.m_count() != codebook.m_count() || codes.k_count() != codebook.k_count()) {
    throw InputError("training: code shape does not match the codebook");
  }
}

KMeansOptions kmeans_options(const TrainConfig& config) {
  return {config.max_iters, config.threads};
}

// Runs refinement sweeps until the sweep budget is spent or progress stalls.
double run_sweeps(const VectorSet& data, Codebook& codebook, CrossProductTable& cross,
                  EncodedDataset& codes, const TrainConfig& config, double current,
                  std::vector<TrainStep>& steps, Clock::time_point start) {
  for (std::size_t s = 1; s <= config.sweeps; ++s) {
    const double offset = seconds_since(start);
    SweepResult sweep = da_sweep(data, codebook, cross, codes, config, s);
    for (TrainStep& step : sweep.steps) {
      step.seconds += offset;
      steps.push_back(step);
    }
    const double gain = current - sweep.distortion;
    current = sweep.distortion;
    if (!(gain >= config.rel_tol * std::abs(current + gain)) || current == 0.0) break;
  }
  return current;
}

}  // namespace

void TrainConfig::validate() const {
  if (m_count == 0) throw InputError("m_count must be at least 1");
  if (k_count == 0 || k_count > 65536) throw InputError("k_count must be in [1, 65536]");
  if (beam_width == 0) throw InputError("beam_width must be at least 1");
  if (schedule_stages == 0) throw InputError("schedule_stages must be at least 1");
  if (max_iters == 0) throw InputError("max_iters must be at least 1");
  if (std::isnan(rel_tol) || rel_tol < 0.0) throw InputError("rel_tol must be non-negative");
}

VectorSet heat_up(const VectorSet& data, const Codebook& codebook, const EncodedDataset& codes,
                  std::size_t m) {
  check_consistent(data, codebook, codes);
  if (m >= codebook.m_count()) throw InputError("heat_up: dictionary index out of range");
  const std::size_t d = data.dim();
  VectorSet out(data.size(), d);
  std::vector<double> acc(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    const auto code = codes.row(i);
    for (std::size_t j = 0; j < d; ++j) acc[j] = x[j];
    for (std::size_t other = 0; other < codebook.m_count(); ++other) {
      if (other == m) continue;
      const auto c = codebook.codeword(other, code[other]);
      for (std::size_t j = 0; j < d; ++j) acc[j] -= c[j];
    }
    auto dst = out.row(i);
    for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<float>(acc[j]);
  }
  return out;
}

Centroids cool_down(const VectorSet& intermediate, Codebook& codebook, std::size_t m,
                    const TrainConfig& config) {
  if (m >= codebook.m_count()) throw InputError("cool_down: dictionary index out of range");
  if (intermediate.dim() != codebook.dim()) throw InputError("cool_down: dimension mismatch");
  Centroids init(codebook.k_count(), codebook.dim());
  const auto dict = codebook.dictionary(m);
  init.values.assign(dict.begin(), dict.end());
  Centroids fitted = improved_kmeans(intermediate, init,
                                     dimension_schedule(codebook.dim(), config.schedule_stages),
                                     kmeans_options(config));
  codebook.set_dictionary(m, fitted.values);
  return fitted;
}

SweepResult da_sweep(const VectorSet& data, Codebook& codebook, CrossProductTable& cross,
                     EncodedDataset& codes, const TrainConfig& config, std::size_t sweep_index) {
  check_consistent(data, codebook, codes);
  const auto start = Clock::now();
  const std::size_t n = data.size();
  const std::size_t m_count = codebook.m_count();
  SweepResult result;
  std::vector<double> errors(n);
  for (std::size_t m = 0; m < m_count; ++m) {
    const VectorSet intermediate = heat_up(data, codebook, codes, m);
    const Centroids fitted = cool_down(intermediate, codebook, m, config);
    cross.update_dictionary(codebook, m);

    // Each vector takes the better of the beam result and its old code with
    // dictionary m reassigned to the nearest new codeword. The latter alone
    // can only lower distortion, so the sweep is monotone.
    parallel_for(n, config.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
      MultipathEncoder encoder(codebook, cross);
      std::vector<Code> candidate(m_count);
      for (std::size_t i = begin; i < end; ++i) {
        auto code = codes.row(i);
        code[m] = static_cast<Code>(fitted.assignment[i]);
        const double kept = squared_error(codebook, data.row(i), code);
        const double found = encoder.encode(data.row(i), config.beam_width, candidate);
        if (found < kept) {
          std::copy(candidate.begin(), candidate.end(), code.begin());
          errors[i] = found;
        } else {
          errors[i] = kept;
        }
      }
    });
    double total = 0.0;
    for (double e : errors) total += e;
    result.distortion = n == 0 ? 0.0 : total / static_cast<double>(n);
    result.steps.push_back({sweep_index, m, result.distortion, seconds_since(start)});
  }
  codes.set_codebook_fingerprint(codebook.fingerprint());
  return result;
}

TrainResult train_from_scratch(const VectorSet& data, const TrainConfig& config) {
  config.validate();
  if (data.size() < config.k_count) {
    throw InputError("train: need at least K = " + std::to_string(config.k_count) +
                     " vectors, got " + std::to_string(data.size()));
  }
  const auto start = Clock::now();
  Codebook codebook(data.dim(), config.m_count, config.k_count);
  EncodedDataset codes(data.size(), config.m_count, config.k_count);
  TrainReport report;
  report.initial_distortion = distortion(codebook, data, codes, config.threads);

  // Growth pass: fit each all-zero dictionary to the current residue and
  // extend the codes greedily, without re-encoding earlier dictionaries.
  double current = report.initial_distortion;
  for (std::size_t m = 0; m < config.m_count; ++m) {
    const VectorSet residue = heat_up(data, codebook, codes, m);
    const Centroids fitted = cool_down(residue, codebook, m, config);
    for (std::size_t i = 0; i < data.size(); ++i) {
      codes.row(i)[m] = static_cast<Code>(fitted.assignment[i]);
    }
    current = distortion(codebook, data, codes, config.threads);
    report.steps.push_back({0, m, current, seconds_since(start)});
  }

  CrossProductTable cross(codebook);
  run_sweeps(data, codebook, cross, codes, config, current, report.steps, start);

  ReorderResult reordered = reorder_by_variance(codebook);
  EncodedDataset permuted = permute_codes(codes, reordered.permutation);
  permuted.set_codebook_fingerprint(reordered.codebook.fingerprint());
  return {std::move(reordered.codebook), std::move(permuted), std::move(report)};
}

TrainReport refine(const VectorSet& data, Codebook& codebook, EncodedDataset& codes,
                   const TrainConfig& config) {
  config.validate();
  check_consistent(data, codebook, codes);
  codes.validate();
  const auto start = Clock::now();
  TrainReport report;
  report.initial_distortion = distortion(codebook, data, codes, config.threads);
  CrossProductTable cross(codebook);
  run_sweeps(data, codebook, cross, codes, config, report.initial_distortion, report.steps, start);
  codes.set_codebook_fingerprint(codebook.fingerprint());
  return report;
}

OnlineResult train_online(const Codebook& codebook, const VectorSet& batch,
                          const TrainConfig& config) {
  config.validate();
  if (batch.dim() != codebook.dim()) {
    throw InputError("online: batch dimension " + std::to_string(batch.dim()) +
                     " differs from codebook dimension " + std::to_string(codebook.dim()));
  }
  if (config.m_count != codebook.m_count() || config.k_count != codebook.k_count()) {
    throw InputError("online: config M/K do not match the codebook");
  }
  OnlineResult result{codebook, {}};
  EncodedDataset codes = encode_dataset(result.codebook, batch, config.beam_width, config.threads);
  result.report = refine(batch, result.codebook, codes, config);
  return result;
}

}  // namespace annealvq
