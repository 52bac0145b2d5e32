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

#include "darank/synthgen/generator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "darank/common/error.h"

namespace darank {
namespace {

constexpr int kHardResampleLimit = 1000;
constexpr int kAbsoluteResampleLimit = 200000;

struct SharedDraws {
  Eigen::VectorXd direction;   // unit shift direction
  Eigen::VectorXd shift;       // target latent mean
  Eigen::VectorXd quality;     // unit direction of document quality
  Eigen::MatrixXd dense_map;   // dense_dim x latent_dim
};

SharedDraws draw_shared(const GenConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto L = static_cast<Eigen::Index>(cfg.latent_dim);
  const auto F = static_cast<Eigen::Index>(cfg.dense_dim);

  SharedDraws shared;
  Eigen::VectorXd u(L);
  for (Eigen::Index i = 0; i < L; ++i) u[i] = normal(rng);
  u.normalize();
  shared.direction = u;
  shared.shift = cfg.domain_shift * u;
  Eigen::VectorXd v(L);
  for (Eigen::Index i = 0; i < L; ++i) v[i] = normal(rng);
  shared.quality = v.normalized();

  // Orthonormal columns (or rows when dense_dim < latent_dim) keep the
  // isotropy of the latent distribution in feature space.
  const Eigen::Index tall = std::max(F, L);
  const Eigen::Index wide = std::min(F, L);
  Eigen::MatrixXd g(tall, wide);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, wide);
  shared.dense_map = F >= L ? q : Eigen::MatrixXd(q.transpose());
  return shared;
}

std::int64_t bucket_id(const GenConfig& cfg, std::int64_t coord, double value) {
  const std::int64_t per_coord = cfg.vocab_size / cfg.latent_dim;
  const double t = (value / cfg.latent_std + 3.0) / 6.0;
  const auto b = static_cast<std::int64_t>(std::floor(t * static_cast<double>(per_coord)));
  return coord * per_coord + std::clamp<std::int64_t>(b, 0, per_coord - 1);
}

// `count` distinct latent coordinates in draw order.
std::vector<std::int64_t> pick_coords(std::int64_t latent_dim, std::int64_t count,
                                      std::mt19937_64& rng) {
  std::vector<std::int64_t> coords(static_cast<std::size_t>(latent_dim));
  std::iota(coords.begin(), coords.end(), 0);
  for (std::int64_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::int64_t> pick(i, latent_dim - 1);
    std::swap(coords[static_cast<std::size_t>(i)], coords[static_cast<std::size_t>(pick(rng))]);
  }
  coords.resize(static_cast<std::size_t>(count));
  return coords;
}

std::vector<std::int64_t> ngram_bag(const GenConfig& cfg, const Eigen::VectorXd& latent,
                                    std::int64_t min_ids, std::int64_t max_ids,
                                    std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> size(min_ids, max_ids);
  std::vector<std::int64_t> ids;
  for (std::int64_t c : pick_coords(cfg.latent_dim, size(rng), rng)) {
    ids.push_back(bucket_id(cfg, c, latent[c]));
  }
  return ids;
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

struct QueryDraw {
  QueryExample example;
  int clicked_position = 0;  // 1-based
  int resamples = 0;
  Eigen::VectorXd doc_latent_sum;
};

QueryDraw draw_query(const GenConfig& cfg, const SharedDraws& shared, bool target,
                     std::int64_t index) {
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(target),
                    static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto L = static_cast<Eigen::Index>(cfg.latent_dim);
  const auto n = static_cast<std::size_t>(cfg.docs_per_query);

  auto latent = [&](bool shifted) {
    Eigen::VectorXd v(L);
    for (Eigen::Index i = 0; i < L; ++i) v[i] = cfg.latent_std * normal(rng);
    if (target && shifted) v += shared.shift;
    return v;
  };

  QueryDraw out;
  QueryExample& q = out.example;
  q.query_id = (target ? "T" : "S") + std::to_string(index);
  q.domain = target ? cfg.target_name : std::string(kSourceDomain);
  std::uniform_int_distribution<std::int64_t> day(1, cfg.n_days);
  q.day = day(rng);

  const Eigen::VectorXd query_latent = latent(cfg.shift_queries);
  q.query_ngram_ids = ngram_bag(cfg, query_latent, cfg.query_ngrams_min, cfg.query_ngrams_max, rng);

  std::vector<DocumentEntry> docs(n);
  std::vector<double> base(n);
  out.doc_latent_sum = Eigen::VectorXd::Zero(L);
  const double norm = cfg.latent_std * cfg.latent_std * std::sqrt(static_cast<double>(L));
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd d = latent(true);
    out.doc_latent_sum += d;
    Eigen::VectorXd dense = shared.dense_map * d / cfg.latent_std;
    for (Eigen::Index k = 0; k < dense.size(); ++k) dense[k] += cfg.dense_noise * normal(rng);
    docs[j].dense_features.assign(dense.data(), dense.data() + dense.size());
    docs[j].sparse_ngram_ids = ngram_bag(cfg, d, cfg.doc_ngrams_min, cfg.doc_ngrams_max, rng);
    base[j] = cfg.relevance_scale * query_latent.dot(d) / norm +
              cfg.quality_weight * shared.quality.dot(d) / cfg.latent_std + cfg.relevance_bias;
  }

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> rel(n), noisy(n);
  std::vector<std::size_t> order(n);
  for (int attempt = 1;; ++attempt) {
    if (attempt > kAbsoluteResampleLimit) {
      throw ConfigError("/domain_shift", "query " + q.query_id + " found no single-click sample in " +
                                             std::to_string(kAbsoluteResampleLimit) +
                                             " resamples; reduce domain_shift or relevance_noise");
    }
    for (std::size_t j = 0; j < n; ++j) {
      rel[j] = base[j] + cfg.relevance_noise * normal(rng);
      // Gumbel(0, legacy_noise) perturbation of the legacy ranking score.
      const double u = std::max(uniform(rng), 1e-300);
      noisy[j] = rel[j] - cfg.legacy_noise * std::log(-std::log(u));
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return noisy[a] > noisy[b]; });
    int clicks = 0;
    std::size_t clicked_slot = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const bool examined = uniform(rng) < cfg.examination_probs[p];
      const bool clicked = examined && uniform(rng) < logistic(rel[order[p]]);
      if (clicked) {
        ++clicks;
        clicked_slot = p;
      }
    }
    if (clicks == 1) {
      out.resamples = attempt;
      q.docs.reserve(n);
      for (std::size_t p = 0; p < n; ++p) {
        DocumentEntry d = docs[order[p]];
        d.shown_position = static_cast<int>(p + 1);
        d.clicked = p == clicked_slot;
        q.docs.push_back(std::move(d));
      }
      out.clicked_position = static_cast<int>(clicked_slot + 1);
      q.propensity_weight = 1.0 / cfg.examination_probs[clicked_slot];
      return out;
    }
  }
}

struct DomainResult {
  Dataset data;
  std::vector<double> latent_mean;
  std::vector<std::int64_t> histogram;
  std::int64_t hard = 0;
  double resamples = 0.0;
};

DomainResult draw_domain(const GenConfig& cfg, const SharedDraws& shared, bool target) {
  const std::int64_t count = target ? cfg.n_target_queries : cfg.n_source_queries;
  DomainResult r;
  r.data.meta = CorpusMeta{cfg.vocab_size, cfg.dense_dim, cfg.docs_per_query};
  r.data.examples.reserve(static_cast<std::size_t>(count));
  r.histogram.assign(static_cast<std::size_t>(cfg.docs_per_query), 0);
  Eigen::VectorXd latent_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.latent_dim));
  double weight_sum = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    QueryDraw d = draw_query(cfg, shared, target, i);
    ++r.histogram[static_cast<std::size_t>(d.clicked_position - 1)];
    if (d.resamples > kHardResampleLimit) ++r.hard;
    r.resamples += d.resamples;
    latent_sum += d.doc_latent_sum;
    weight_sum += d.example.propensity_weight;
    r.data.examples.push_back(std::move(d.example));
  }
  if (count > 0) {
    const double mean_weight = weight_sum / static_cast<double>(count);
    for (auto& q : r.data.examples) q.propensity_weight /= mean_weight;
    latent_sum /= static_cast<double>(count * cfg.docs_per_query);
  }
  r.latent_mean.assign(latent_sum.data(), latent_sum.data() + latent_sum.size());
  return r;
}

}  // namespace

void validate(const GenConfig& cfg) {
  auto require = [](bool ok, const char* pointer, const char* what) {
    if (!ok) throw ConfigError(pointer, what);
  };
  require(cfg.n_source_queries > 0, "/n_source_queries", "must be positive");
  require(cfg.n_target_queries > 0, "/n_target_queries", "must be positive");
  require(cfg.dense_dim > 0, "/dense_dim", "must be positive");
  require(cfg.docs_per_query >= 2, "/docs_per_query", "must be at least 2");
  require(cfg.n_days > 0, "/n_days", "must be positive");
  require(cfg.latent_dim > 0, "/latent_dim", "must be positive");
  require(cfg.vocab_size >= cfg.latent_dim, "/vocab_size", "must be at least latent_dim");
  require(cfg.query_ngrams_min >= 0 && cfg.query_ngrams_min <= cfg.query_ngrams_max,
          "/query_ngrams_min", "must lie in [0, query_ngrams_max]");
  require(cfg.query_ngrams_max <= cfg.latent_dim, "/query_ngrams_max",
          "must not exceed latent_dim");
  require(cfg.doc_ngrams_min >= 0 && cfg.doc_ngrams_min <= cfg.doc_ngrams_max,
          "/doc_ngrams_min", "must lie in [0, doc_ngrams_max]");
  require(cfg.doc_ngrams_max <= cfg.latent_dim, "/doc_ngrams_max", "must not exceed latent_dim");
  require(std::isfinite(cfg.domain_shift) && cfg.domain_shift >= 0.0, "/domain_shift",
          "must be finite and non-negative");
  require(std::isfinite(cfg.relevance_noise) && cfg.relevance_noise >= 0.0, "/relevance_noise",
          "must be finite and non-negative");
  require(std::isfinite(cfg.latent_std) && cfg.latent_std > 0.0, "/latent_std",
          "must be positive");
  require(std::isfinite(cfg.dense_noise) && cfg.dense_noise >= 0.0, "/dense_noise",
          "must be finite and non-negative");
  require(std::isfinite(cfg.relevance_scale), "/relevance_scale", "must be finite");
  require(std::isfinite(cfg.relevance_bias), "/relevance_bias", "must be finite");
  require(std::isfinite(cfg.quality_weight), "/quality_weight", "must be finite");
  require(std::isfinite(cfg.legacy_noise) && cfg.legacy_noise >= 0.0, "/legacy_noise",
          "must be finite and non-negative");
  require(!cfg.target_name.empty() && cfg.target_name != kSourceDomain, "/target_name",
          "must be non-empty and differ from \"source\"");
  require(static_cast<std::int64_t>(cfg.examination_probs.size()) == cfg.docs_per_query,
          "/examination_probs", "needs one entry per shown position");
  for (std::size_t i = 0; i < cfg.examination_probs.size(); ++i) {
    const double p = cfg.examination_probs[i];
    require(p > 0.0 && p <= 1.0, "/examination_probs", "entries must lie in (0, 1]");
    if (i > 0) {
      require(p <= cfg.examination_probs[i - 1], "/examination_probs",
              "entries must be non-increasing");
    }
  }
  require(cfg.examination_probs.empty() || cfg.examination_probs[0] == 1.0,
          "/examination_probs", "the top position must always be examined (1.0)");
}

GeneratedCorpus generate(const GenConfig& cfg) {
  validate(cfg);
  const SharedDraws shared = draw_shared(cfg);
  DomainResult source = draw_domain(cfg, shared, false);
  DomainResult target = draw_domain(cfg, shared, true);

  const std::int64_t total = cfg.n_source_queries + cfg.n_target_queries;
  const std::int64_t hard = source.hard + target.hard;
  if (hard * 100 > total) {
    throw ConfigError("/domain_shift",
                      std::to_string(hard) + " of " + std::to_string(total) +
                          " queries needed more than " + std::to_string(kHardResampleLimit) +
                          " resamples for a single click; use a smaller domain_shift or "
                          "relevance_noise");
  }

  GeneratedCorpus out;
  out.report.source_latent_mean = std::move(source.latent_mean);
  out.report.target_latent_mean = std::move(target.latent_mean);
  out.report.shift_direction.assign(shared.direction.data(),
                                    shared.direction.data() + shared.direction.size());
  out.report.source_click_histogram = std::move(source.histogram);
  out.report.target_click_histogram = std::move(target.histogram);
  out.report.hard_queries = hard;
  out.report.mean_resamples = (source.resamples + target.resamples) / static_cast<double>(total);
  out.source = std::move(source.data);
  out.target = std::move(target.data);
  return out;
}

}  // namespace darank
