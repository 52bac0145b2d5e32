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

#include "darank/eval/ttest.h"

#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "darank/common/error.h"

namespace darank {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-15;
constexpr int kMaxTerms = 10000;

// Continued fraction of I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw NumericError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw NumericError("incomplete beta needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw NumericError("t distribution needs df > 0");
  if (std::isnan(t)) throw NumericError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("paired t-test needs samples of equal length");
  if (a.size() < 2) throw Error("paired t-test needs at least two pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i] - mean;
    ss += e * e;
  }
  TTestResult r;
  r.degrees_of_freedom = static_cast<std::int64_t>(a.size()) - 1;
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p_value = 0.0;
      r.degenerate = true;
    }
  } else {
    r.t_statistic = mean / (sd / std::sqrt(n));
    r.p_value = student_t_two_tailed_p(r.t_statistic, n - 1.0);
  }
  r.significant_at_99 = r.p_value < 0.01;
  return r;
}

TTestResult paired_ttest(const EvalReport& a, const EvalReport& b) {
  if (a.per_query.size() != b.per_query.size()) {
    throw Error("paired t-test: reports cover different numbers of queries");
  }
  std::unordered_map<std::string, double> by_id;
  by_id.reserve(b.per_query.size());
  for (const QueryRank& r : b.per_query) by_id[r.query_id] = r.weight * r.reciprocal_rank;
  if (by_id.size() != b.per_query.size()) throw Error("paired t-test: duplicate query ids");
  std::vector<double> xa, xb;
  xa.reserve(a.per_query.size());
  xb.reserve(a.per_query.size());
  for (const QueryRank& r : a.per_query) {
    const auto it = by_id.find(r.query_id);
    if (it == by_id.end()) throw Error("paired t-test: query " + r.query_id + " missing");
    xa.push_back(r.weight * r.reciprocal_rank);
    xb.push_back(it->second);
  }
  return paired_ttest(xa, xb);
}

}  // namespace darank
