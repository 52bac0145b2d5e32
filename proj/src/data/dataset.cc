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

#include "darank/data/dataset.h"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "darank/common/error.h"

namespace darank {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const QueryExample& q) {
  ordered_json docs = ordered_json::array();
  for (const auto& d : q.docs) {
    docs.push_back({{"sparse_ngrams", d.sparse_ngram_ids},
                    {"dense", d.dense_features},
                    {"clicked", d.clicked},
                    {"position", d.shown_position}});
  }
  return {{"query_id", q.query_id},
          {"domain", q.domain},
          {"day", q.day},
          {"query_ngrams", q.query_ngram_ids},
          {"propensity_weight", q.propensity_weight},
          {"docs", std::move(docs)}};
}

template <typename T>
T required(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing key '") + key + "'");
  return it->get<T>();
}

QueryExample from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("line is not a JSON object");
  QueryExample q;
  q.query_id = required<std::string>(j, "query_id");
  q.domain = required<std::string>(j, "domain");
  q.day = required<std::int64_t>(j, "day");
  q.query_ngram_ids = required<std::vector<std::int64_t>>(j, "query_ngrams");
  q.propensity_weight = required<double>(j, "propensity_weight");
  const auto it = j.find("docs");
  if (it == j.end() || !it->is_array()) {
    throw std::invalid_argument("missing array 'docs'");
  }
  for (const auto& dj : *it) {
    if (!dj.is_object()) throw std::invalid_argument("document is not an object");
    DocumentEntry d;
    d.sparse_ngram_ids = required<std::vector<std::int64_t>>(dj, "sparse_ngrams");
    d.dense_features = required<std::vector<double>>(dj, "dense");
    d.clicked = required<bool>(dj, "clicked");
    d.shown_position = required<int>(dj, "position");
    q.docs.push_back(std::move(d));
  }
  return q;
}

void check_ids(const QueryExample& q, const std::vector<std::int64_t>& ids,
               std::int64_t vocab_size, const char* what) {
  for (std::int64_t id : ids) {
    if (id < 0 || id >= vocab_size) {
      throw ValidationError(q.query_id, std::string(what) + " id " +
                                            std::to_string(id) +
                                            " outside vocabulary of size " +
                                            std::to_string(vocab_size));
    }
  }
}

}  // namespace

std::size_t QueryExample::clicked_index() const {
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].clicked) return i;
  }
  throw ValidationError(query_id, "exactly one click required, found none");
}

void validate(const QueryExample& q, const CorpusMeta& meta) {
  if (q.query_id.empty()) throw ValidationError("", "empty query_id");
  if (q.domain.empty()) throw ValidationError(q.query_id, "empty domain");
  if (q.day < 0) throw ValidationError(q.query_id, "negative day");
  if (!std::isfinite(q.propensity_weight) || q.propensity_weight <= 0.0) {
    throw ValidationError(q.query_id, "propensity_weight must be finite and positive");
  }
  if (static_cast<std::int64_t>(q.docs.size()) != meta.docs_per_query) {
    throw ValidationError(q.query_id, "expected " + std::to_string(meta.docs_per_query) +
                                          " documents, found " +
                                          std::to_string(q.docs.size()));
  }
  check_ids(q, q.query_ngram_ids, meta.vocab_size, "query n-gram");
  int clicks = 0;
  std::set<int> positions;
  for (const auto& d : q.docs) {
    clicks += d.clicked ? 1 : 0;
    if (d.shown_position < 1 || d.shown_position > meta.docs_per_query) {
      throw ValidationError(q.query_id, "position " + std::to_string(d.shown_position) +
                                            " outside [1, " +
                                            std::to_string(meta.docs_per_query) + "]");
    }
    if (!positions.insert(d.shown_position).second) {
      throw ValidationError(q.query_id, "duplicate position " +
                                            std::to_string(d.shown_position));
    }
    if (static_cast<std::int64_t>(d.dense_features.size()) != meta.dense_dim) {
      throw ValidationError(q.query_id, "dense feature length " +
                                            std::to_string(d.dense_features.size()) +
                                            " != corpus dense_dim " +
                                            std::to_string(meta.dense_dim));
    }
    for (double v : d.dense_features) {
      if (!std::isfinite(v)) throw ValidationError(q.query_id, "non-finite dense feature");
    }
    check_ids(q, d.sparse_ngram_ids, meta.vocab_size, "document n-gram");
  }
  if (clicks != 1) {
    throw ValidationError(q.query_id, "exactly one click required, found " +
                                          std::to_string(clicks));
  }
}

void validate(const Dataset& ds) {
  if (ds.meta.vocab_size <= 0 || ds.meta.dense_dim < 0 || ds.meta.docs_per_query < 2) {
    throw ValidationError("", "invalid corpus metadata");
  }
  std::set<std::string> ids;
  for (const auto& q : ds.examples) {
    validate(q, ds.meta);
    if (!ids.insert(q.query_id).second) {
      throw ValidationError(q.query_id, "duplicate query_id");
    }
  }
}

void save_jsonl(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& q : ds.examples) {
    out << to_json(q).dump() << '\n';
  }
  if (!out) throw IoError("write failed on " + path.string());
}

Dataset load_jsonl(const std::filesystem::path& path, const CorpusMeta& meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Dataset ds;
  ds.meta = meta;
  std::set<std::string> ids;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    QueryExample q;
    try {
      q = from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    validate(q, meta);
    if (!ids.insert(q.query_id).second) {
      throw ValidationError(q.query_id, "duplicate query_id");
    }
    ds.examples.push_back(std::move(q));
  }
  return ds;
}

Dataset load_jsonl(const std::filesystem::path& path) {
  return load_jsonl(path, load_meta(path.parent_path() / "meta.json"));
}

void save_meta(const CorpusMeta& meta, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const ordered_json j = {{"vocab_size", meta.vocab_size},
                          {"dense_dim", meta.dense_dim},
                          {"docs_per_query", meta.docs_per_query}};
  out << j.dump(2) << '\n';
}

CorpusMeta load_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  CorpusMeta meta;
  try {
    const auto j = nlohmann::json::parse(in);
    meta.vocab_size = required<std::int64_t>(j, "vocab_size");
    meta.dense_dim = required<std::int64_t>(j, "dense_dim");
    meta.docs_per_query = required<std::int64_t>(j, "docs_per_query");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  if (meta.vocab_size <= 0 || meta.dense_dim < 0 || meta.docs_per_query < 2) {
    throw ValidationError("", "invalid corpus metadata in " + path.string());
  }
  return meta;
}

}  // namespace darank
