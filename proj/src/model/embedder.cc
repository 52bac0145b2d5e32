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

#include "darank/model/embedder.h"

#include <string>

#include "darank/common/error.h"
#include "darank/nn/feed_forward.h"

namespace darank {
namespace {

void check_ids(const QueryExample& q, const std::vector<std::int64_t>& ids,
               Eigen::Index vocab_size) {
  for (std::int64_t id : ids) {
    if (id < 0 || id >= vocab_size) {
      throw VocabError("query " + q.query_id + ": n-gram id " + std::to_string(id) +
                       " outside vocabulary of size " + std::to_string(vocab_size));
    }
  }
}

// Mean of the referenced table rows written into `out`; zeros for an empty bag.
template <typename Out>
void pool(const DenseMatrix& table, const std::vector<std::int64_t>& ids, Out&& out) {
  out.setZero();
  if (ids.empty()) return;
  for (std::int64_t id : ids) out += table.row(id);
  out /= static_cast<double>(ids.size());
}

// Fills rows [row, row + docs) of `inputs` for query `q`.
void fill_inputs(const QueryExample& q, const EmbedderParams& params,
                 DenseMatrix& inputs, Eigen::Index row) {
  const Eigen::Index kq = params.query_table.cols();
  const Eigen::Index kd = params.doc_table.cols();
  const Eigen::Index dense = params.dense_dim();
  check_ids(q, q.query_ngram_ids, params.vocab_size());

  Eigen::RowVectorXd query_part(kq);
  pool(params.query_table, q.query_ngram_ids, query_part);
  for (std::size_t j = 0; j < q.docs.size(); ++j) {
    const auto& doc = q.docs[j];
    check_ids(q, doc.sparse_ngram_ids, params.vocab_size());
    if (static_cast<Eigen::Index>(doc.dense_features.size()) != dense) {
      throw ShapeError("query " + q.query_id + ": dense feature length " +
                       std::to_string(doc.dense_features.size()) + " != " +
                       std::to_string(dense));
    }
    auto r = inputs.row(row + static_cast<Eigen::Index>(j));
    r.head(kq) = query_part;
    pool(params.doc_table, doc.sparse_ngram_ids, r.segment(kq, kd));
    for (Eigen::Index k = 0; k < dense; ++k) {
      r[kq + kd + k] = doc.dense_features[static_cast<std::size_t>(k)];
    }
  }
}

}  // namespace

EmbedderParams zeros_like(const EmbedderParams& params) {
  EmbedderParams out;
  out.query_table = DenseMatrix::Zero(params.query_table.rows(), params.query_table.cols());
  out.doc_table = DenseMatrix::Zero(params.doc_table.rows(), params.doc_table.cols());
  out.final_layer = zeros_like(params.final_layer);
  return out;
}

EmbedderParams init_embedder(const CorpusMeta& meta, const EmbedderDims& dims,
                             std::mt19937_64& rng) {
  if (dims.query_dim <= 0 || dims.doc_dim <= 0 || dims.embed_dim <= 0) {
    throw ShapeError("embedder dimensions must be positive");
  }
  EmbedderParams p;
  p.query_table = DenseMatrix::Zero(meta.vocab_size, dims.query_dim);
  p.doc_table = DenseMatrix::Zero(meta.vocab_size, dims.doc_dim);
  p.final_layer =
      LayerParams(dims.embed_dim, dims.query_dim + dims.doc_dim + meta.dense_dim);
  glorot_uniform(p.query_table, rng);
  glorot_uniform(p.doc_table, rng);
  glorot_uniform(p.final_layer.weight, rng);
  return p;
}

void check_embedder(const EmbedderParams& params, const CorpusMeta& meta) {
  check_layer(params.final_layer);
  if (params.query_table.rows() != meta.vocab_size ||
      params.doc_table.rows() != meta.vocab_size) {
    throw ShapeError("embedding tables do not match vocab_size " +
                     std::to_string(meta.vocab_size));
  }
  if (params.dense_dim() != meta.dense_dim) {
    throw ShapeError("embedding layer expects dense_dim " +
                     std::to_string(params.dense_dim()) + ", corpus has " +
                     std::to_string(meta.dense_dim));
  }
}

DenseMatrix embed(const QueryExample& q, const EmbedderParams& params) {
  DenseMatrix inputs(static_cast<Eigen::Index>(q.docs.size()), params.final_layer.in_dim());
  fill_inputs(q, params, inputs, 0);
  DenseMatrix out = affine_forward_batch(params.final_layer, inputs);
  activate_in_place(Activation::kTanh, out);
  return out;
}

EmbeddingBatch embed_batch(std::span<const QueryExample* const> queries,
                           const std::vector<bool>& is_target,
                           const EmbedderParams& params) {
  if (is_target.size() != queries.size()) {
    throw ShapeError("domain labels do not match the number of queries");
  }
  EmbeddingBatch batch;
  batch.queries.assign(queries.begin(), queries.end());
  batch.is_target.assign(is_target.begin(), is_target.end());
  batch.offsets.reserve(queries.size() + 1);
  Eigen::Index rows = 0;
  batch.offsets.push_back(0);
  for (const QueryExample* q : queries) {
    rows += static_cast<Eigen::Index>(q->docs.size());
    batch.offsets.push_back(rows);
  }
  batch.inputs.resize(rows, params.final_layer.in_dim());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    fill_inputs(*queries[i], params, batch.inputs, batch.offsets[i]);
  }
  batch.embeddings = affine_forward_batch(params.final_layer, batch.inputs);
  activate_in_place(Activation::kTanh, batch.embeddings);
  return batch;
}

EmbeddingBatch embed_batch(std::span<const QueryExample* const> queries,
                           const EmbedderParams& params) {
  std::vector<bool> flags(queries.size(), false);
  for (std::size_t i = 0; i < queries.size(); ++i) flags[i] = !queries[i]->is_source();
  return embed_batch(queries, flags, params);
}

EmbedderParams embed_backward(const EmbeddingBatch& batch,
                              const EmbedderParams& params,
                              const DenseMatrix& upstream) {
  if (upstream.rows() != batch.embeddings.rows() ||
      upstream.cols() != batch.embeddings.cols()) {
    throw ShapeError("upstream gradient does not match the embedding batch");
  }
  BatchLayerGrads layer = layer_backward_batch(params.final_layer, Activation::kTanh,
                                               batch.inputs, batch.embeddings, upstream);
  EmbedderParams grads;
  grads.final_layer.weight = std::move(layer.weight);
  grads.final_layer.bias = std::move(layer.bias);
  grads.query_table = DenseMatrix::Zero(params.query_table.rows(), params.query_table.cols());
  grads.doc_table = DenseMatrix::Zero(params.doc_table.rows(), params.doc_table.cols());

  const Eigen::Index kq = params.query_table.cols();
  const Eigen::Index kd = params.doc_table.cols();
  for (std::size_t i = 0; i < batch.queries.size(); ++i) {
    const QueryExample& q = *batch.queries[i];
    const Eigen::Index begin = batch.offsets[i];
    const Eigen::Index end = batch.offsets[i + 1];
    if (!q.query_ngram_ids.empty()) {
      // The pooled query vector feeds every document row of the query.
      Eigen::RowVectorXd g = layer.input.block(begin, 0, end - begin, kq).colwise().sum();
      g /= static_cast<double>(q.query_ngram_ids.size());
      for (std::int64_t id : q.query_ngram_ids) grads.query_table.row(id) += g;
    }
    for (Eigen::Index r = begin; r < end; ++r) {
      const auto& ids = q.docs[static_cast<std::size_t>(r - begin)].sparse_ngram_ids;
      if (ids.empty()) continue;
      const Eigen::RowVectorXd g =
          layer.input.row(r).segment(kq, kd) / static_cast<double>(ids.size());
      for (std::int64_t id : ids) grads.doc_table.row(id) += g;
    }
  }
  return grads;
}

}  // namespace darank
