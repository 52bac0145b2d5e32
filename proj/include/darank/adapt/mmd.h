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

#ifndef DARANK_ADAPT_MMD_H_
#define DARANK_ADAPT_MMD_H_

#include "darank/nn/layer.h"

namespace darank {

struct DiscrepancyLoss {
  double value = 0.0;
  DenseMatrix source_grads;
  DenseMatrix target_grads;
};

// ||mean(source rows) - mean(target rows)||_2. At zero discrepancy the
// gradient is the zero subgradient.
DiscrepancyLoss mmd_loss(const DenseMatrix& source, const DenseMatrix& target);

// Frobenius norm of the difference of the two sample covariances (n - 1
// normalization). Needs at least two rows per side.
DiscrepancyLoss covariance_discrepancy(const DenseMatrix& source,
                                       const DenseMatrix& target);

}  // namespace darank

#endif  // DARANK_ADAPT_MMD_H_
