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

#ifndef DARANK_EVAL_TTEST_H_
#define DARANK_EVAL_TTEST_H_

#include <cstdint>
#include <span>

#include "darank/eval/wmrr.h"

namespace darank {

struct TTestResult {
  double t_statistic = 0.0;
  std::int64_t degrees_of_freedom = 0;
  double p_value = 1.0;
  bool significant_at_99 = false;
  // Differences had zero variance and nonzero mean; p is reported as 0.
  bool degenerate = false;
};

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed_p(double t, double df);

// Two-tailed paired t-test on d = a - b (sample sd, df = n - 1). Throws
// Error unless the lengths match and n >= 2.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

// Pairs the per-query weighted reciprocal ranks w_i / rank_i of two reports
// by query_id. Throws Error when the query sets differ.
TTestResult paired_ttest(const EvalReport& a, const EvalReport& b);

}  // namespace darank

#endif  // DARANK_EVAL_TTEST_H_
