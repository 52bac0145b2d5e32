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

#include "darank/eval/diagnostics.h"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "darank/common/error.h"
#include "darank/nn/singular.h"

namespace darank {
namespace {

constexpr std::size_t kChunk = 512;

Histogram histogram(const Vector& values, const std::vector<double>& edges) {
  Histogram h;
  h.edges = edges;
  const std::size_t bins = edges.size() - 1;
  h.counts.assign(bins, 0);
  const double lo = edges.front();
  const double width = (edges.back() - lo) / static_cast<double>(bins);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::int64_t>(std::floor((values[i] - lo) / width));
    b = std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

Json histogram_json(const Histogram& h) {
  return Json{{"edges", h.edges}, {"counts", h.counts}};
}

}  // namespace

DenseMatrix embed_all(const ModelParams& params, const Dataset& dataset) {
  check_model(params, dataset.meta);
  Eigen::Index rows = 0;
  for (const QueryExample& q : dataset.examples) rows += static_cast<Eigen::Index>(q.docs.size());
  DenseMatrix out(rows, params.embedder.embed_dim());
  Eigen::Index row = 0;
  std::vector<const QueryExample*> chunk;
  for (std::size_t start = 0; start < dataset.examples.size(); start += kChunk) {
    const std::size_t end = std::min(dataset.examples.size(), start + kChunk);
    chunk.clear();
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&dataset.examples[i]);
    const EmbeddingBatch batch = embed_batch(chunk, params.embedder);
    out.middleRows(row, batch.embeddings.rows()) = batch.embeddings;
    row += batch.embeddings.rows();
  }
  return out;
}

NormTriple mean_norms(const DenseMatrix& source, const DenseMatrix& target) {
  if (source.rows() == 0 || target.rows() == 0) {
    throw Error("embedding mean report needs non-empty source and target sets");
  }
  if (source.cols() != target.cols()) throw ShapeError("embedding widths differ");
  const Vector mu_s = source.colwise().mean().transpose();
  const Vector mu_t = target.colwise().mean().transpose();
  return NormTriple{mu_s.norm(), mu_t.norm(), (mu_s - mu_t).norm()};
}

NormTriple embedding_mean_report(const ModelParams& params, const Dataset& source,
                                 const Dataset& target) {
  if (source.examples.empty() || target.examples.empty()) {
    throw Error("embedding mean report needs non-empty source and target sets");
  }
  return mean_norms(embed_all(params, source), embed_all(params, target));
}

double overlap_coefficient(const Histogram& a, const Histogram& b) {
  if (a.counts.size() != b.counts.size()) throw ShapeError("histograms have different bins");
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    na += static_cast<double>(a.counts[i]);
    nb += static_cast<double>(b.counts[i]);
  }
  if (na == 0.0 || nb == 0.0) throw Error("overlap of an empty histogram");
  double s = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    s += std::min(static_cast<double>(a.counts[i]) / na, static_cast<double>(b.counts[i]) / nb);
  }
  return s;
}

ProjectionHistograms projection_histogram(const DenseMatrix& source, const DenseMatrix& target,
                                          int bins, bool centered) {
  if (bins < 1) throw Error("histogram needs at least one bin");
  if (source.rows() == 0 || target.rows() == 0) {
    throw Error("projection histogram needs embeddings from both domains");
  }
  if (source.rows() + target.rows() < 2) throw Error("projection needs at least two rows");
  if (source.cols() != target.cols()) throw ShapeError("embedding widths differ");
  DenseMatrix stacked(source.rows() + target.rows(), source.cols());
  stacked << source, target;
  if (centered) stacked = center_columns(stacked);
  if (stacked.cwiseAbs().maxCoeff() == 0.0) {
    throw Error("degenerate embeddings: all rows coincide");
  }
  // The R factor of a thin QR has the same right singular vectors as the
  // stacked matrix and keeps the power iteration small.
  const Eigen::Index k = stacked.cols();
  DenseMatrix r;
  if (stacked.rows() >= k) {
    Eigen::HouseholderQR<DenseMatrix> qr(stacked);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  } else {
    r = stacked;
  }
  PowerIterationOptions opts;
  opts.max_iter = 1000000;
  ProjectionHistograms out;
  out.centered = centered;
  out.direction = top_singular_direction(r, opts);

  const Vector ps = source * out.direction;
  const Vector pt = target * out.direction;
  const double lo = std::min(ps.minCoeff(), pt.minCoeff());
  const double hi = std::max(ps.maxCoeff(), pt.maxCoeff());
  if (!(hi > lo)) throw Error("degenerate embeddings: all projections coincide");
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    edges[static_cast<std::size_t>(i)] =
        i == bins ? hi : lo + (hi - lo) * static_cast<double>(i) / bins;
  }
  out.source = histogram(ps, edges);
  out.target = histogram(pt, edges);
  out.overlap = overlap_coefficient(out.source, out.target);
  return out;
}

ProjectionHistograms projection_histogram(const ModelParams& params, const Dataset& source,
                                          const Dataset& target, int bins, bool centered) {
  return projection_histogram(embed_all(params, source), embed_all(params, target), bins,
                              centered);
}

DiagnosticsReport diagnose(const ModelParams& params, const Dataset& source,
                           const Dataset& target, int bins, bool centered) {
  const DenseMatrix es = embed_all(params, source);
  const DenseMatrix et = embed_all(params, target);
  DiagnosticsReport report;
  report.norms = mean_norms(es, et);
  report.projection = projection_histogram(es, et, bins, centered);
  return report;
}

Json to_json(const DiagnosticsReport& report) {
  const auto& p = report.projection;
  return Json{{"source_mean_norm", report.norms.source_mean_norm},
              {"target_mean_norm", report.norms.target_mean_norm},
              {"mean_difference_norm", report.norms.mean_difference_norm},
              {"projection",
               {{"centered", p.centered},
                {"direction", std::vector<double>(p.direction.data(),
                                                  p.direction.data() + p.direction.size())},
                {"overlap_coefficient", p.overlap},
                {"source", histogram_json(p.source)},
                {"target", histogram_json(p.target)}}}};
}

}  // namespace darank
