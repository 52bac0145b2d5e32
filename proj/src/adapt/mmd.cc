/*
 * Copyright 2026 The darank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "darank/adapt/mmd.h"

#include "darank/common/error.h"

namespace darank {
namespace {

void check_pair(const DenseMatrix& source, const DenseMatrix& target,
                Eigen::Index min_rows) {
  if (source.rows() < min_rows || target.rows() < min_rows) {
    throw ShapeError("discrepancy needs at least " + std::to_string(min_rows) +
                     " embeddings per domain");
  }
  if (source.cols() != target.cols()) {
    throw ShapeError("source and target embeddings differ in width");
  }
}

DenseMatrix sample_covariance(const DenseMatrix& rows) {
  const DenseMatrix centered = rows.rowwise() - rows.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
}

}  // namespace

DiscrepancyLoss mmd_loss(const DenseMatrix& source, const DenseMatrix& target) {
  check_pair(source, target, 1);
  const Eigen::RowVectorXd diff = source.colwise().mean() - target.colwise().mean();
  DiscrepancyLoss out;
  out.value = diff.norm();
  out.source_grads = DenseMatrix::Zero(source.rows(), source.cols());
  out.target_grads = DenseMatrix::Zero(target.rows(), target.cols());
  if (out.value > 0.0) {
    const Eigen::RowVectorXd unit = diff / out.value;
    out.source_grads.rowwise() = unit / static_cast<double>(source.rows());
    out.target_grads.rowwise() = -unit / static_cast<double>(target.rows());
  }
  return out;
}

DiscrepancyLoss covariance_discrepancy(const DenseMatrix& source,
                                       const DenseMatrix& target) {
  check_pair(source, target, 2);
  const DenseMatrix delta = sample_covariance(source) - sample_covariance(target);
  DiscrepancyLoss out;
  out.value = delta.norm();
  out.source_grads = DenseMatrix::Zero(source.rows(), source.cols());
  out.target_grads = DenseMatrix::Zero(target.rows(), target.cols());
  if (out.value > 0.0) {
    // d<G, C>/dx_i = 2/(n-1) * G (x_i - mean) for symmetric G = delta / value.
    const DenseMatrix g = delta / out.value;
    const DenseMatrix cs = source.rowwise() - source.colwise().mean();
    const DenseMatrix ct = target.rowwise() - target.colwise().mean();
    out.source_grads = (2.0 / static_cast<double>(source.rows() - 1)) * cs * g;
    out.target_grads = (-2.0 / static_cast<double>(target.rows() - 1)) * ct * g;
  }
  return out;
}

}  // namespace darank
