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

#ifndef DARANK_NN_SINGULAR_H_
#define DARANK_NN_SINGULAR_H_

#include <cstdint>
#include <utility>

#include "darank/common/error.h"
#include "darank/nn/layer.h"

namespace darank {

// Power iteration did not settle in the allotted iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Vector last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const Vector& last_iterate() const { return last_iterate_; }

 private:
  Vector last_iterate_;
};

enum class Centering {
  kNone,
  // Subtract the column means first (covariance eigenvector).
  kColumns,
};

struct PowerIterationOptions {
  double tol = 1e-9;
  int max_iter = 10000;
  std::uint64_t seed = 0;
  Centering centering = Centering::kNone;
};

// Unit right singular vector of the largest singular value of `m`, found by
// power iteration on a power of m^T m (repeated squaring). Converged once
// successive iterates satisfy |<v_k, v_{k+1}>| >= 1 - tol. The sign is fixed so that the entry of
// largest magnitude is positive.
Vector top_singular_direction(const DenseMatrix& m,
                              const PowerIterationOptions& options = {});

// Subtracts each column's mean.
DenseMatrix center_columns(const DenseMatrix& m);

}  // namespace darank

#endif  // DARANK_NN_SINGULAR_H_
