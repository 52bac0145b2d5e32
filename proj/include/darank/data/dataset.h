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

#ifndef DARANK_DATA_DATASET_H_
#define DARANK_DATA_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace darank {

inline constexpr char kSourceDomain[] = "source";

struct DocumentEntry {
  std::vector<std::int64_t> sparse_ngram_ids;
  std::vector<double> dense_features;
  bool clicked = false;
  // 1-based slot the legacy ranker showed this document in.
  int shown_position = 0;

  bool operator==(const DocumentEntry&) const = default;
};

struct QueryExample {
  std::string query_id;
  std::vector<std::int64_t> query_ngram_ids;
  std::vector<DocumentEntry> docs;
  // "source" or the name of a target domain.
  std::string domain;
  std::int64_t day = 0;
  // Inverse examination propensity of the clicked position.
  double propensity_weight = 1.0;

  bool is_source() const { return domain == kSourceDomain; }
  // Index into `docs` of the single clicked document. Assumes validity.
  std::size_t clicked_index() const;

  bool operator==(const QueryExample&) const = default;
};

struct CorpusMeta {
  std::int64_t vocab_size = 0;
  std::int64_t dense_dim = 0;
  std::int64_t docs_per_query = 6;

  bool operator==(const CorpusMeta&) const = default;
};

struct Dataset {
  CorpusMeta meta;
  std::vector<QueryExample> examples;

  bool operator==(const Dataset&) const = default;
};

// Throws ValidationError naming the query when `q` breaks a corpus
// invariant: exactly one click, docs_per_query documents, unique positions
// in [1, N], dense length, ids in range, positive finite weight.
void validate(const QueryExample& q, const CorpusMeta& meta);
void validate(const Dataset& ds);

// JSON Lines, one query per line. Reals are written in shortest round-trip
// form, so loading reproduces every field exactly.
void save_jsonl(const Dataset& ds, const std::filesystem::path& path);
Dataset load_jsonl(const std::filesystem::path& path, const CorpusMeta& meta);
// Reads the corpus metadata from `meta.json` next to `path`.
Dataset load_jsonl(const std::filesystem::path& path);

void save_meta(const CorpusMeta& meta, const std::filesystem::path& path);
CorpusMeta load_meta(const std::filesystem::path& path);

}  // namespace darank

#endif  // DARANK_DATA_DATASET_H_
