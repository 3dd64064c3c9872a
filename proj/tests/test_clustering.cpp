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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "annealvq/errors.hpp"
#include "annealvq/kmeans.hpp"
#include "annealvq/pca.hpp"
#include "annealvq/synthetic.hpp"
#include "support/oracles.hpp"

using namespace annealvq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double full_objective(const VectorSet& data, const Centroids& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.k; ++j) best = std::min(best, oracle::sq_dist(data.row(i), c.centroid(j)));
    total += best;
  }
  return total;
}

}  // namespace

TEST_CASE("pca finds the diagonal direction of points on y = x") {
  VectorSet data(5, 2, {0, 0, 1, 1, 2, 2, -3, -3, 5, 5});
  const PcaModel pca = pca_fit(data);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK_THAT(std::abs(pca.rotation[0]), WithinAbs(s, 1e-6));
  CHECK_THAT(std::abs(pca.rotation[1]), WithinAbs(s, 1e-6));
  CHECK(pca.rotation[0] * pca.rotation[1] > 0);
}

TEST_CASE("pca rotation is orthonormal, invertible and distance preserving") {
  for (std::size_t n : {200u, 3u}) {  // covariance route and Gram route
    const VectorSet data = oracle::random_vectors(n, 6, 40 + n, 3.0f);
    const PcaModel pca = pca_fit(data);
    for (std::size_t a = 0; a < 6; ++a) {
      for (std::size_t b = 0; b < 6; ++b) {
        double dot = 0.0;
        for (std::size_t k = 0; k < 6; ++k) dot += pca.rotation[a * 6 + k] * pca.rotation[b * 6 + k];
        CHECK_THAT(dot, WithinAbs(a == b ? 1.0 : 0.0, 1e-4));
      }
    }
    for (std::size_t c = 1; c < 6; ++c) CHECK(pca.variances[c] <= pca.variances[c - 1] + 1e-12);
    const VectorSet rotated = pca.rotate(data);
    const VectorSet back = pca.unrotate(rotated);
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t j = 0; j < 6; ++j) CHECK_THAT(back.row(i)[j], WithinAbs(data.row(i)[j], 1e-4 * 3.0));
    }
    for (std::size_t i = 1; i < data.size(); ++i) {
      CHECK_THAT(oracle::sq_dist(rotated.row(i), rotated.row(0)),
                 WithinRel(oracle::sq_dist(data.row(i), data.row(0)), 1e-4));
    }
  }
}

TEST_CASE("pca variances match an independent eigen solver") {
  const VectorSet data = oracle::random_vectors(200, 5, 77);
  // Give the axes distinct scales so the spectrum is well separated.
  VectorSet scaled = data;
  for (std::size_t i = 0; i < scaled.size(); ++i)
    for (std::size_t j = 0; j < 5; ++j) scaled.row(i)[j] *= static_cast<float>(j + 1);
  const PcaModel pca = pca_fit(scaled);
  std::vector<double> values, vectors;
  oracle::jacobi_eigen(oracle::covariance(scaled), 5, values, vectors);
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK_THAT(pca.variances[c], WithinRel(values[c], 1e-4));
    double align = 0.0;
    for (std::size_t k = 0; k < 5; ++k) align += pca.rotation[c * 5 + k] * vectors[c * 5 + k];
    CHECK_THAT(std::abs(align), WithinAbs(1.0, 1e-4));
  }
  CHECK_THROWS_AS(pca_fit(oracle::random_vectors(1, 5, 1)), InputError);
}

TEST_CASE("dimension schedule") {
  CHECK(dimension_schedule(1, 10).dims == std::vector<std::size_t>{1});
  CHECK(dimension_schedule(960, 10).dims ==
        std::vector<std::size_t>{2, 4, 8, 16, 31, 62, 123, 244, 484, 960});
  // Independent evaluation for d = 4: ceil(4^{i/10}) deduplicated.
  std::vector<std::size_t> expect;
  for (int i = 1; i <= 10; ++i) {
    const auto v = static_cast<std::size_t>(std::ceil(std::pow(4.0, i / 10.0) - 1e-9));
    if (expect.empty() || expect.back() != v) expect.push_back(v);
  }
  CHECK(dimension_schedule(4, 10).dims == expect);
  CHECK(expect.back() == 4);
  for (std::size_t d : {3u, 32u, 128u}) {
    const auto dims = dimension_schedule(d, 10).dims;
    CHECK(dims.back() == d);
    for (std::size_t i = 1; i < dims.size(); ++i) CHECK(dims[i] > dims[i - 1]);
  }
}

TEST_CASE("lloyd on the leading coordinate still updates trailing means") {
  const VectorSet data(3, 2, {0, 9, 0, 11, 10, 0});
  Centroids init(2, 2);
  init.values = {0, 0, 10, 0};
  const Centroids out = lloyd_kmeans(data, init, 1);
  CHECK(out.centroid(0)[0] == 0.0f);
  CHECK(out.centroid(1)[0] == 10.0f);
  CHECK(out.centroid(0)[1] == 10.0f);
  CHECK(out.centroid(1)[1] == 0.0f);
}

TEST_CASE("lloyd with zero iterations only assigns") {
  const VectorSet data = oracle::random_vectors(50, 3, 8);
  Centroids init(4, 3);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t t = 0; t < 3; ++t) init.centroid(j)[t] = data.row(j)[t];
  const Centroids out = lloyd_kmeans(data, init, 3, {0, 1});
  CHECK(out.values == init.values);
  CHECK(out.assignment.size() == 50);
  CHECK_THAT(out.objective, WithinRel(full_objective(data, init), 1e-9));
}

TEST_CASE("lloyd objective never increases") {
  const VectorSet data = oracle::random_vectors(500, 8, 9);
  Centroids init(8, 8);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t t = 0; t < 8; ++t) init.centroid(j)[t] = data.row(j * 3)[t];
  for (std::size_t active : {2u, 8u}) {
    const Centroids out = lloyd_kmeans(data, init, active);
    for (std::size_t i = 1; i < out.objective_trace.size(); ++i) {
      CHECK(out.objective_trace[i] <= out.objective_trace[i - 1] * (1 + 1e-12));
    }
    for (std::uint32_t a : out.assignment) CHECK(a < 8);
  }
  const Centroids full = lloyd_kmeans(data, init, 8);
  CHECK(full_objective(data, full) <= full_objective(data, init));
  CHECK_THROWS_AS(lloyd_kmeans(oracle::random_vectors(3, 8, 1), init, 8), InputError);
}

TEST_CASE("empty clusters are reseeded") {
  const VectorSet data = oracle::random_vectors(100, 4, 10);
  const Centroids zero(16, 4);  // every point lands on centroid 0 at first
  const Centroids out = lloyd_kmeans(data, zero, 4);
  std::vector<std::size_t> counts(16, 0);
  for (std::uint32_t a : out.assignment) ++counts[a];
  for (std::size_t c : counts) CHECK(c > 0);
}

TEST_CASE("improved k-means never loses to its init and keeps fixed points") {
  const VectorSet data = oracle::random_vectors(400, 6, 12);
  Centroids init(8, 6);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t t = 0; t < 6; ++t) init.centroid(j)[t] = data.row(j)[t];
  const Centroids out = improved_kmeans(data, init, dimension_schedule(6, 10));
  CHECK(full_objective(data, out) <= full_objective(data, init) * (1 + 1e-6));
  CHECK_THAT(out.objective, WithinRel(full_objective(data, out), 1e-9));

  // A converged Lloyd result stays put under a single full stage.
  const Centroids fixed = lloyd_kmeans(data, init, 6, {500, 1});
  const Centroids again = improved_kmeans(data, fixed, DimensionSchedule{{6}}, {500, 1});
  CHECK_THAT(again.objective, WithinRel(full_objective(data, fixed), 1e-6));
}

TEST_CASE("improved k-means is competitive with plain k-means on mixtures") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticSpec spec;
    const VectorSet data = generate_synthetic(3000, 32, spec, seed);
    const Centroids zero(64, 32);
    const Centroids improved = improved_kmeans(data, zero, dimension_schedule(32, 10));
    const Centroids plain = lloyd_kmeans(data, zero, 32);
    if (full_objective(data, improved) <= full_objective(data, plain) * (1 + 1e-9)) ++wins;
  }
  CHECK(wins >= 8);
}
