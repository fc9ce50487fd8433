// Copyright 2026 The MGCTM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mgctm/baselines.hpp"
#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"
#include "mgctm/model.hpp"
#include "mgctm/numerics.hpp"
#include "mgctm/parallel.hpp"
#include "random.hpp"

namespace mgctm {

void LdaOptions::validate() const {
  if (num_topics < 1) throw ConfigError("num_topics must be >= 1");
  if (!(alpha > 0.0) || !(eta > 0.0)) throw ConfigError("LDA priors must be positive");
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (!(tol > 0.0) || !(e_step_tol > 0.0)) throw ConfigError("LDA tolerances must be positive");
  if (e_step_iters < 1) throw ConfigError("e_step_iters must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

void LdaModel::validate(double tol) const {
  if (topics.rows != topic_lambda.rows || topics.cols != topic_lambda.cols ||
      doc_theta.cols != topics.rows) {
    throw DimensionError("LDA model arrays do not match");
  }
  for (std::size_t t = 0; t < topics.rows; ++t) {
    double s = 0.0;
    for (double x : topics.row(t)) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("LDA topic entry out of range");
      s += x;
    }
    if (std::abs(s - 1.0) > tol) throw DomainError("LDA topic does not sum to 1");
  }
  for (double x : doc_theta.data) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("LDA doc_theta must be positive");
  }
}

namespace {

constexpr std::size_t kDocsPerChunk = 64;

struct TopicCounts {
  DenseMatrix counts;  // T x V
  void clear() { std::fill(counts.data.begin(), counts.data.end(), 0.0); }
};

// E log beta, word-major: out[w * T + t]. Also returns the topic part of
// the bound, E log p(beta | eta) - E log q(beta).
double prepare_topics(const DenseMatrix& lambda, double eta, std::vector<double>& out) {
  const std::size_t T = lambda.rows, V = lambda.cols;
  out.assign(T * V, 0.0);
  std::vector<double> row(V);
  const double prior_norm =
      numerics::log_gamma(eta * static_cast<double>(V)) - static_cast<double>(V) * numerics::log_gamma(eta);
  double bound = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    numerics::dirichlet_expected_log(lambda.row(t), row);
    bound += prior_norm - numerics::dirichlet_log_normalizer(lambda.row(t));
    for (std::size_t w = 0; w < V; ++w) {
      bound += (eta - lambda(t, w)) * row[w];
      out[w * T + t] = row[w];
    }
  }
  return bound;
}

// Coordinate ascent on one document; returns its part of the bound and
// adds n * phi into `counts`.
double lda_doc(const Document& doc, const std::vector<double>& elog_beta, const LdaOptions& o,
               std::span<double> gamma, DenseMatrix* counts) {
  const std::size_t T = gamma.size();
  const auto& entries = doc.entries();
  std::vector<double> phi(entries.size() * T), elog_theta(T), next(T);
  for (int round = 0; round < o.e_step_iters; ++round) {
    numerics::dirichlet_expected_log(gamma, elog_theta);
    std::fill(next.begin(), next.end(), o.alpha);
    for (std::size_t u = 0; u < entries.size(); ++u) {
      std::span<double> p(phi.data() + u * T, T);
      kernels::add(elog_theta,
                   std::span<const double>(elog_beta.data() + entries[u].word * T, T), p);
      numerics::log_normalize_inplace(p);
      kernels::axpy(entries[u].count, p, next);
    }
    double change = 0.0;
    for (std::size_t t = 0; t < T; ++t) change = std::max(change, std::abs(next[t] - gamma[t]) / gamma[t]);
    std::copy(next.begin(), next.end(), gamma.begin());
    if (change < o.e_step_tol) break;
  }

  numerics::dirichlet_expected_log(gamma, elog_theta);
  double bound = numerics::log_gamma(o.alpha * static_cast<double>(T)) -
                 static_cast<double>(T) * numerics::log_gamma(o.alpha) -
                 numerics::dirichlet_log_normalizer(gamma);
  for (std::size_t t = 0; t < T; ++t) bound += (o.alpha - gamma[t]) * elog_theta[t];
  for (std::size_t u = 0; u < entries.size(); ++u) {
    const double n = entries[u].count;
    std::span<const double> p(phi.data() + u * T, T);
    const double* eb = elog_beta.data() + entries[u].word * T;
    double s = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      if (p[t] > 0.0) s += p[t] * (elog_theta[t] + eb[t] - std::log(p[t]));
    }
    bound += n * s;
    if (counts) {
      for (std::size_t t = 0; t < T; ++t) (*counts)(t, entries[u].word) += n * p[t];
    }
  }
  return bound;
}

void refresh_topics(LdaModel& m) {
  m.topics = m.topic_lambda;
  for (std::size_t t = 0; t < m.topics.rows; ++t) {
    auto row = m.topics.row(t);
    kernels::scale(row, 1.0 / kernels::sum(row));
  }
}

}  // namespace

LdaModel fit_lda(const Corpus& corpus, const LdaOptions& o) {
  o.validate();
  if (corpus.num_docs() == 0) throw DomainError("fit_lda: empty corpus");
  const std::size_t D = corpus.num_docs(), V = corpus.vocab_size();
  const std::size_t T = static_cast<std::size_t>(o.num_topics);

  LdaModel m;
  m.alpha = o.alpha;
  m.eta = o.eta;
  m.topic_lambda = DenseMatrix(T, V);
  Rng rng(o.seed);
  const double mass = static_cast<double>(corpus.total_tokens()) / static_cast<double>(T);
  std::vector<double> noise(V);
  for (std::size_t t = 0; t < T; ++t) {
    sample_dirichlet_symmetric(rng, 1.0, noise);
    for (std::size_t w = 0; w < V; ++w) {
      m.topic_lambda(t, w) = o.eta + mass * (0.5 / static_cast<double>(V) + 0.5 * noise[w]);
    }
  }
  m.doc_theta = DenseMatrix(D, T);
  for (std::size_t d = 0; d < D; ++d) {
    const double init = o.alpha + static_cast<double>(corpus.doc(d).length()) / static_cast<double>(T);
    std::fill(m.doc_theta.row(d).begin(), m.doc_theta.row(d).end(), init);
  }

  std::vector<double> elog_beta;
  std::vector<double> doc_bounds(D);
  for (int iter = 0; iter < o.max_iters; ++iter) {
    const double topic_bound = prepare_topics(m.topic_lambda, o.eta, elog_beta);
    const TopicCounts prototype{DenseMatrix(T, V)};
    TopicCounts total = prototype;
    parallel::chunked_reduce(
        D, kDocsPerChunk, o.threads, prototype, total,
        [&](std::size_t begin, std::size_t end, TopicCounts& acc) {
          for (std::size_t d = begin; d < end; ++d) {
            doc_bounds[d] = lda_doc(corpus.doc(d), elog_beta, o, m.doc_theta.row(d), &acc.counts);
          }
        },
        [](TopicCounts& into, const TopicCounts& part) {
          kernels::axpy(1.0, part.counts.data, into.counts.data);
        });

    double value = topic_bound;
    for (double b : doc_bounds) value += b;
    if (!std::isfinite(value)) {
      throw NumericalError("non-finite LDA bound at iteration " + std::to_string(iter + 1), "lda");
    }
    if (!m.elbo_trace.empty()) {
      const double prev = m.elbo_trace.back();
      if (value < prev - kElboRelativeSlack * std::abs(prev)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "LDA bound decreased at iteration " << iter + 1 << ": " << prev << " -> " << value
            << " (topic part " << topic_bound << ")";
        throw NumericalError(msg.str(), "lda");
      }
    }
    m.elbo_trace.push_back(value);
    m.iterations_run = iter + 1;

    for (std::size_t i = 0; i < T * V; ++i) m.topic_lambda.data[i] = o.eta + total.counts.data[i];

    if (m.elbo_trace.size() >= 2) {
      const double prev = m.elbo_trace[m.elbo_trace.size() - 2];
      if (std::abs(value - prev) < o.tol * std::abs(prev)) {
        m.converged = true;
        break;
      }
    }
  }
  refresh_topics(m);
  return m;
}

DenseMatrix topic_proportions(const LdaModel& model) {
  DenseMatrix out = model.doc_theta;
  for (std::size_t d = 0; d < out.rows; ++d) {
    auto row = out.row(d);
    kernels::scale(row, 1.0 / kernels::sum(row));
  }
  return out;
}

ClusterLabels lda_naive_cluster(const LdaModel& model) {
  std::vector<int> labels(model.doc_theta.rows);
  for (std::size_t d = 0; d < labels.size(); ++d) labels[d] = argmax(model.doc_theta.row(d));
  return ClusterLabels(std::move(labels), std::max(model.num_topics(), 1));
}

ClusterLabels lda_kmeans(const Corpus& corpus, const LdaOptions& lda, const KMeansOptions& km) {
  km.validate();
  const LdaModel model = fit_lda(corpus, lda);
  return kmeans(topic_proportions(model), km).labels;
}

}  // namespace mgctm
