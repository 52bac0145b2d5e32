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

#ifndef DARANK_EVAL_DIAGNOSTICS_H_
#define DARANK_EVAL_DIAGNOSTICS_H_

#include <cstdint>
#include <vector>

#include "darank/common/json_util.h"
#include "darank/data/dataset.h"
#include "darank/model/model.h"

namespace darank {

struct NormTriple {
  double source_mean_norm = 0.0;
  double target_mean_norm = 0.0;
  double mean_difference_norm = 0.0;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 strictly increasing values
  std::vector<std::int64_t> counts;
};

struct ProjectionHistograms {
  bool centered = true;
  Vector direction;  // unit top singular direction, sign fixed
  Histogram source;
  Histogram target;
  double overlap = 0.0;
};

struct DiagnosticsReport {
  NormTriple norms;
  ProjectionHistograms projection;
};

// Every document embedding of `dataset`, one row per document.
DenseMatrix embed_all(const ModelParams& params, const Dataset& dataset);

// (||mu_S||, ||mu_T||, ||mu_S - mu_T||) of the row means. Throws Error on
// an empty side.
NormTriple mean_norms(const DenseMatrix& source, const DenseMatrix& target);
NormTriple embedding_mean_report(const ModelParams& params, const Dataset& source,
                                 const Dataset& target);

// Sum over bins of min(p_S, p_T) where p are counts normalized to 1.
double overlap_coefficient(const Histogram& a, const Histogram& b);

// Projects both embedding sets on the top singular direction of their
// stacked matrix (column-centered when `centered`) and histograms each set
// over shared, equal-width bins spanning the projection range. Throws
// Error when fewer than two rows are given or all projections coincide.
ProjectionHistograms projection_histogram(const DenseMatrix& source, const DenseMatrix& target,
                                          int bins = 50, bool centered = true);
ProjectionHistograms projection_histogram(const ModelParams& params, const Dataset& source,
                                          const Dataset& target, int bins = 50,
                                          bool centered = true);

DiagnosticsReport diagnose(const ModelParams& params, const Dataset& source,
                           const Dataset& target, int bins = 50, bool centered = true);

Json to_json(const DiagnosticsReport& report);

}  // namespace darank

#endif  // DARANK_EVAL_DIAGNOSTICS_H_
