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

#ifndef DARANK_DATA_SPLIT_H_
#define DARANK_DATA_SPLIT_H_

#include "darank/common/error.h"
#include "darank/data/dataset.h"

namespace darank {

class SplitError : public Error {
 public:
  using Error::Error;
};

struct TemporalSplit {
  Dataset train;
  Dataset eval;
};

// Picks the smallest day d* whose cumulative fraction of examples reaches
// `ratio` and puts days <= d* in train, later days in eval. A day is never
// divided. If d* is the last day, the boundary moves one day earlier so the
// eval side is non-empty. Example order is preserved on both sides.
TemporalSplit temporal_split(const Dataset& ds, double ratio);

}  // namespace darank

#endif  // DARANK_DATA_SPLIT_H_
