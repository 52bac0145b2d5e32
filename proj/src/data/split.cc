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

#include "darank/data/split.h"

#include <map>

namespace darank {

TemporalSplit temporal_split(const Dataset& ds, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw SplitError("split ratio must lie in (0, 1)");
  }
  std::map<std::int64_t, std::size_t> per_day;
  for (const auto& q : ds.examples) ++per_day[q.day];
  if (per_day.size() < 2) {
    throw SplitError("temporal split needs examples on at least two days");
  }

  const double total = static_cast<double>(ds.examples.size());
  std::size_t cumulative = 0;
  auto boundary = per_day.begin();
  for (auto it = per_day.begin(); it != per_day.end(); ++it) {
    cumulative += it->second;
    boundary = it;
    if (static_cast<double>(cumulative) / total >= ratio - 1e-12) break;
  }
  if (std::next(boundary) == per_day.end()) --boundary;
  const std::int64_t last_train_day = boundary->first;

  TemporalSplit out;
  out.train.meta = ds.meta;
  out.eval.meta = ds.meta;
  for (const auto& q : ds.examples) {
    (q.day <= last_train_day ? out.train : out.eval).examples.push_back(q);
  }
  return out;
}

}  // namespace darank
