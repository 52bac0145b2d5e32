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

#include "darank/nn/singular.h"

#include <cmath>
#include <random>

namespace darank {
namespace {

void fix_sign(Vector& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

// Squarings of the Gram matrix before iterating: G^1024 has the same top
// eigenvector with the eigenvalue ratio raised to the 1024th power.
constexpr int kSquarings = 10;

}  // namespace

DenseMatrix center_columns(const DenseMatrix& m) {
  DenseMatrix out = m;
  if (m.rows() > 0) {
    const Eigen::RowVectorXd mean = m.colwise().mean();
    out.rowwise() -= mean;
  }
  return out;
}

Vector top_singular_direction(const DenseMatrix& input,
                              const PowerIterationOptions& options) {
  if (!(options.tol > 0.0)) throw NumericError("power iteration tol must be positive");
  if (input.size() == 0) throw ShapeError("power iteration on an empty matrix");

  const DenseMatrix centered = options.centering == Centering::kColumns
                                   ? center_columns(input)
                                   : DenseMatrix();
  const DenseMatrix& m =
      options.centering == Centering::kColumns ? centered : input;
  if (!m.allFinite()) throw NumericError("power iteration on non-finite matrix");
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    throw NumericError("power iteration on a zero matrix");
  }

  Eigen::MatrixXd gram = m.transpose() * m;
  for (int i = 0; i < kSquarings; ++i) {
    gram = (gram * gram).eval();
    gram /= gram.norm();
    gram = 0.5 * (gram + gram.transpose()).eval();
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    Vector next = gram * v;
    const double norm = next.norm();
    if (norm == 0.0) {
      // Start vector landed in the null space; restart from a fresh draw.
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
      v.normalize();
      continue;
    }
    next /= norm;
    const double agreement = std::abs(next.dot(v));
    v = std::move(next);
    if (agreement >= 1.0 - options.tol) {
      fix_sign(v);
      return v;
    }
  }
  fix_sign(v);
  throw ConvergenceError("power iteration did not converge in " +
                             std::to_string(options.max_iter) + " iterations",
                         v);
}

}  // namespace darank
