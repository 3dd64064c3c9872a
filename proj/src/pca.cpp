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

#include "annealvq/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "annealvq/errors.hpp"

namespace annealvq {
namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Appends unit vectors orthogonal to `basis` (rows) until it has dim rows,
// drawing candidates from the standard basis.
void complete_basis(std::vector<Eigen::VectorXd>& basis, std::size_t dim) {
  for (std::size_t axis = 0; axis < dim && basis.size() < dim; ++axis) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(axis));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    const double norm = v.norm();
    if (norm > 1e-6) basis.push_back(v / norm);
  }
}

}  // namespace

void PcaModel::rotate(std::span<const float> x, std::span<float> out) const {
  for (std::size_t i = 0; i < dim; ++i) {
    const double* axis = rotation.data() + i * dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) acc += axis[j] * (static_cast<double>(x[j]) - mean[j]);
    out[i] = static_cast<float>(acc);
  }
}

void PcaModel::unrotate(std::span<const float> y, std::span<float> out) const {
  std::vector<double> acc(mean);
  for (std::size_t i = 0; i < dim; ++i) {
    const double* axis = rotation.data() + i * dim;
    const double yi = y[i];
    for (std::size_t j = 0; j < dim; ++j) acc[j] += axis[j] * yi;
  }
  for (std::size_t j = 0; j < dim; ++j) out[j] = static_cast<float>(acc[j]);
}

VectorSet PcaModel::rotate(const VectorSet& data) const {
  VectorSet out(data.size(), dim);
  for (std::size_t i = 0; i < data.size(); ++i) rotate(data.row(i), out.row(i));
  return out;
}

VectorSet PcaModel::unrotate(const VectorSet& data) const {
  VectorSet out(data.size(), dim);
  for (std::size_t i = 0; i < data.size(); ++i) unrotate(data.row(i), out.row(i));
  return out;
}

PcaModel pca_fit(const VectorSet& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n < 2) throw InputError("pca_fit: needs at least 2 vectors");

  PcaModel model;
  model.dim = d;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += row[j];
  }
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix centred(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      centred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j] - model.mean[j];
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);

  std::vector<Eigen::VectorXd> axes;
  std::vector<double> variances;
  if (n >= d) {
    const Matrix cov = (centred.transpose() * centred) * scale;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) throw InvariantError("pca_fit: eigensolver failed");
    for (Eigen::Index i = static_cast<Eigen::Index>(d) - 1; i >= 0; --i) {
      axes.push_back(solver.eigenvectors().col(i).normalized());
      variances.push_back(std::max(0.0, solver.eigenvalues()(i)));
    }
  } else {
    // Gram route: eigenvectors u of X Xᵀ map to principal axes Xᵀu / ‖Xᵀu‖.
    const Matrix gram = (centred * centred.transpose()) * scale;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success) throw InvariantError("pca_fit: eigensolver failed");
    const double top = std::max(solver.eigenvalues().maxCoeff(), 0.0);
    for (Eigen::Index i = static_cast<Eigen::Index>(n) - 1; i >= 0; --i) {
      const double lambda = solver.eigenvalues()(i);
      if (lambda <= top * 1e-12 || lambda <= 0.0) break;
      Eigen::VectorXd axis = centred.transpose() * solver.eigenvectors().col(i);
      for (const auto& b : axes) axis -= b.dot(axis) * b;
      const double norm = axis.norm();
      if (norm <= 1e-9) continue;
      axes.push_back(axis / norm);
      variances.push_back(lambda);
    }
    complete_basis(axes, d);
    variances.resize(d, 0.0);
  }

  model.rotation.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      model.rotation[i * d + j] = axes[i](static_cast<Eigen::Index>(j));
    }
  }
  model.variances = std::move(variances);
  return model;
}

}  // namespace annealvq
