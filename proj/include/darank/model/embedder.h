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

#ifndef DARANK_MODEL_EMBEDDER_H_
#define DARANK_MODEL_EMBEDDER_H_

#include <concepts>
#include <random>
#include <span>
#include <vector>

#include "darank/data/dataset.h"
#include "darank/nn/layer.h"

namespace darank {

struct EmbedderDims {
  int query_dim = 16;
  int doc_dim = 16;
  int embed_dim = 32;

  bool operator==(const EmbedderDims&) const = default;
};

// Lookup tables for the two n-gram bags plus the tanh layer that maps the
// concatenation [query bag | document bag | dense features] to x_d.
struct EmbedderParams {
  DenseMatrix query_table;  // vocab_size x query_dim
  DenseMatrix doc_table;    // vocab_size x doc_dim
  LayerParams final_layer;  // embed_dim x (query_dim + doc_dim + dense_dim)

  Eigen::Index vocab_size() const { return query_table.rows(); }
  Eigen::Index embed_dim() const { return final_layer.out_dim(); }
  Eigen::Index dense_dim() const {
    return final_layer.in_dim() - query_table.cols() - doc_table.cols();
  }
};

EmbedderParams zeros_like(const EmbedderParams& params);
EmbedderParams init_embedder(const CorpusMeta& meta, const EmbedderDims& dims,
                             std::mt19937_64& rng);

// Throws ShapeError when tables and final layer disagree with each other
// or with the corpus metadata.
void check_embedder(const EmbedderParams& params, const CorpusMeta& meta);

// Embedded documents of a batch of queries. Rows of `embeddings` are the
// per-document vectors; query i owns rows [offsets[i], offsets[i+1]).
struct EmbeddingBatch {
  std::vector<const QueryExample*> queries;
  std::vector<bool> is_target;
  std::vector<Eigen::Index> offsets;
  DenseMatrix inputs;      // concatenated layer inputs, one row per document
  DenseMatrix embeddings;  // tanh outputs, one row per document

  std::size_t num_queries() const { return queries.size(); }
};

// x_d for every document of `q`, one row per document. Bags are mean
// pooled (duplicates counted with multiplicity); an empty bag yields zeros.
DenseMatrix embed(const QueryExample& q, const EmbedderParams& params);

EmbeddingBatch embed_batch(std::span<const QueryExample* const> queries,
                           const std::vector<bool>& is_target,
                           const EmbedderParams& params);
EmbeddingBatch embed_batch(std::span<const QueryExample* const> queries,
                           const EmbedderParams& params);

// Gradient of a loss wrt the embedder parameters, given d(loss)/d(x_d) for
// every row of `batch.embeddings`. Table rows not referenced in the batch
// receive exactly zero.
EmbedderParams embed_backward(const EmbeddingBatch& batch,
                              const EmbedderParams& params,
                              const DenseMatrix& upstream);

template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, EmbedderParams>
void for_each_block(Params& p, Fn&& fn) {
  fn(std::span(p.query_table.data(), p.query_table.size()));
  fn(std::span(p.doc_table.data(), p.doc_table.size()));
  fn(std::span(p.final_layer.weight.data(), p.final_layer.weight.size()));
  fn(std::span(p.final_layer.bias.data(), p.final_layer.bias.size()));
}

}  // namespace darank

#endif  // DARANK_MODEL_EMBEDDER_H_
