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

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"
#include "mgctm/log.hpp"
#include "mgctm/model.hpp"
#include "mgctm/numerics.hpp"
#include "mgctm/parallel.hpp"
#include "random.hpp"

namespace mgctm {

SufficientStats::SufficientStats(int J_, int K_, int R_, std::size_t V_)
    : J(J_),
      K(K_),
      R(R_),
      V(V_),
      zeta_sum(J_, 0.0),
      local_counts(static_cast<std::size_t>(J_) * K_ * V_, 0.0),
      global_counts(static_cast<std::size_t>(R_) * V_, 0.0),
      local_log_theta(static_cast<std::size_t>(J_) * K_, 0.0),
      global_log_theta(R_, 0.0) {}

void SufficientStats::clear() {
  num_docs = 0;
  std::fill(zeta_sum.begin(), zeta_sum.end(), 0.0);
  std::fill(local_counts.begin(), local_counts.end(), 0.0);
  std::fill(global_counts.begin(), global_counts.end(), 0.0);
  std::fill(local_log_theta.begin(), local_log_theta.end(), 0.0);
  std::fill(global_log_theta.begin(), global_log_theta.end(), 0.0);
  log_omega = {0.0, 0.0};
}

void SufficientStats::add_doc(const Document& doc, const DocVariational& s) {
  if (!s.has_word_state()) throw ConfigError("sufficient statistics need per-word state");
  num_docs += 1.0;
  kernels::axpy(1.0, s.zeta, zeta_sum);
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    const double n = entries[u].count;
    const WordId w = entries[u].word;
    for (int j = 0; j < J; ++j) {
      const double weight = n * s.zeta[j] * s.tau[u];
      if (weight == 0.0) continue;
      const auto phi = s.phi(u, j);
      for (int k = 0; k < K; ++k) {
        local_counts[(static_cast<std::size_t>(j) * K + k) * V + w] += weight * phi[k];
      }
    }
    const double gweight = n * (1.0 - s.tau[u]);
    if (gweight == 0.0) continue;
    const auto phi_g = s.phi_g(u);
    for (int k = 0; k < R; ++k) global_counts[static_cast<std::size_t>(k) * V + w] += gweight * phi_g[k];
  }

  std::vector<double> elog(K);
  for (int j = 0; j < J; ++j) {
    numerics::dirichlet_expected_log(s.mu(j), elog);
    kernels::axpy(s.zeta[j], elog, std::span<double>(local_log_theta.data() + j * K, K));
  }
  elog.resize(R);
  numerics::dirichlet_expected_log(s.mu_global, elog);
  kernels::axpy(1.0, elog, global_log_theta);
  const double total = numerics::digamma(s.lambda[0] + s.lambda[1]);
  log_omega[0] += numerics::digamma(s.lambda[0]) - total;
  log_omega[1] += numerics::digamma(s.lambda[1]) - total;
}

void SufficientStats::merge(const SufficientStats& o) {
  num_docs += o.num_docs;
  kernels::axpy(1.0, o.zeta_sum, zeta_sum);
  kernels::axpy(1.0, o.local_counts, local_counts);
  kernels::axpy(1.0, o.global_counts, global_counts);
  kernels::axpy(1.0, o.local_log_theta, local_log_theta);
  kernels::axpy(1.0, o.global_log_theta, global_log_theta);
  log_omega[0] += o.log_omega[0];
  log_omega[1] += o.log_omega[1];
}

namespace {

void smoothed_normalize(std::span<const double> counts, std::span<double> out) {
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = counts[v] + kTopicSmoothing;
  kernels::scale(out, 1.0 / kernels::sum(out));
}

// Re-estimates `prior` in place; keeps the old value if estimation fails.
void refit_prior(std::span<double> prior, numerics::DirichletStats stats,
                 const std::string& name, MStepInfo* info) {
  if (prior.size() < 2) return;  // a one-component Dirichlet is a point mass
  try {
    const auto fit = numerics::dirichlet_mle(stats, prior);
    std::copy(fit.alpha.begin(), fit.alpha.end(), prior.begin());
  } catch (const EstimationError& e) {
    const std::string msg = name + ": " + e.what() + "; keeping previous value";
    log::warn(msg);
    if (info) info->prior_warnings.push_back(msg);
  }
}

}  // namespace

ModelParams m_step(const SufficientStats& stats, const ModelParams& params,
                   const HyperConfig& config, MStepInfo* info) {
  if (stats.J != params.num_clusters || stats.K != params.local_topics ||
      stats.R != params.global_topics || stats.V != params.vocab_size) {
    throw DimensionError("statistics do not match model shape");
  }
  if (!(stats.num_docs > 0.0)) throw DomainError("m_step: no documents");
  ModelParams out = params;
  const int J = stats.J, K = stats.K, R = stats.R;
  const std::size_t V = stats.V;

  for (int j = 0; j < J; ++j) out.pi[j] = stats.zeta_sum[j] / stats.num_docs;

  for (int j = 0; j < J; ++j) {
    if (stats.zeta_sum[j] < kEmptyClusterMass) {
      if (info) info->empty_clusters.push_back(j);
      log::info("cluster " + std::to_string(j) + " is empty; topics and prior frozen");
      continue;
    }
    for (int k = 0; k < K; ++k) {
      const std::size_t row = static_cast<std::size_t>(j) * K + k;
      smoothed_normalize(std::span<const double>(stats.local_counts.data() + row * V, V),
                         out.local_topic(j, k));
    }
    if (config.prior_update == PriorUpdate::kEveryIter) {
      numerics::DirichletStats ds;
      ds.num_obs = stats.zeta_sum[j];
      ds.mean_log.resize(K);
      for (int k = 0; k < K; ++k) ds.mean_log[k] = stats.local_log_theta[j * K + k] / ds.num_obs;
      refit_prior(out.local_prior(j), std::move(ds), "local prior " + std::to_string(j), info);
    }
  }
  for (int k = 0; k < R; ++k) {
    smoothed_normalize(
        std::span<const double>(stats.global_counts.data() + static_cast<std::size_t>(k) * V, V),
        out.global_topic(k));
  }

  if (config.prior_update == PriorUpdate::kEveryIter) {
    numerics::DirichletStats ds;
    ds.num_obs = stats.num_docs;
    ds.mean_log.resize(R);
    for (int k = 0; k < R; ++k) ds.mean_log[k] = stats.global_log_theta[k] / stats.num_docs;
    refit_prior(out.global_prior, std::move(ds), "global prior", info);

    numerics::DirichletStats gs;
    gs.num_obs = stats.num_docs;
    gs.mean_log = {stats.log_omega[0] / stats.num_docs, stats.log_omega[1] / stats.num_docs};
    refit_prior(out.gamma, std::move(gs), "gamma", info);
  }
  return out;
}

ModelParams m_step(const Corpus& corpus, const std::vector<DocVariational>& states,
                   const ModelParams& params, const HyperConfig& config, MStepInfo* info) {
  if (states.size() != corpus.num_docs()) {
    throw DimensionError("need one variational state per document");
  }
  SufficientStats stats(params.num_clusters, params.local_topics, params.global_topics,
                        params.vocab_size);
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) stats.add_doc(corpus.doc(d), states[d]);
  return m_step(stats, params, config, info);
}

namespace {

constexpr std::size_t kDocsPerChunk = 64;

}  // namespace

FitResult fit_from(const Corpus& corpus, const HyperConfig& config, ModelState start,
                   const IterationCallback& on_iteration) {
  config.validate();
  if (corpus.num_docs() == 0) throw DomainError("fit: empty corpus");
  if (start.states.size() != corpus.num_docs()) {
    throw DimensionError("need one variational state per document");
  }
  const auto t0 = std::chrono::steady_clock::now();
  FitResult result{std::move(start.params), std::move(start.states), {}};
  ModelParams& params = result.params;
  auto& states = result.states;
  FitReport& report = result.report;
  const std::size_t D = corpus.num_docs();
  const EStepOptions e_opts{config.e_step_iters, config.e_step_rel_tol};

  for (int iter = 0; iter < config.max_em_iters; ++iter) {
    const PreparedModel model(params);
    const SufficientStats prototype(params.num_clusters, params.local_topics,
                                    params.global_topics, params.vocab_size);
    SufficientStats stats = prototype;
    std::vector<ElboTerms> doc_terms(D);
    parallel::chunked_reduce(
        D, kDocsPerChunk, config.threads, prototype, stats,
        [&](std::size_t begin, std::size_t end, SufficientStats& acc) {
          for (std::size_t d = begin; d < end; ++d) {
            const Document& doc = corpus.doc(d);
            e_step_doc(doc, model, states[d], e_opts);
            doc_terms[d] = doc_elbo(doc, model, states[d]);
            acc.add_doc(doc, states[d]);
            if (!config.retain_word_state) states[d].release_word_state();
          }
        },
        [](SufficientStats& total, const SufficientStats& part) { total.merge(part); });

    ElboTerms terms;
    for (const auto& t : doc_terms) terms += t;
    const double value = terms.total();
    if (!std::isfinite(value)) {
      throw NumericalError("non-finite ELBO at iteration " + std::to_string(iter + 1) + ": " +
                               terms.describe(),
                           "elbo");
    }
    if (!report.elbo_trace.empty()) {
      const double prev = report.elbo_trace.back();
      if (value < prev - kElboRelativeSlack * std::abs(prev)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "ELBO decreased at iteration " << iter + 1 << ": " << prev << " -> " << value
            << "; terms: " << terms.describe() << "; previous terms: "
            << report.final_terms.describe();
        throw NumericalError(msg.str(), "fit");
      }
    }
    report.elbo_trace.push_back(value);
    report.final_terms = terms;
    report.iterations_run = iter + 1;
    if (on_iteration) on_iteration(iter + 1, value);

    params = m_step(stats, params, config);

    if (report.elbo_trace.size() >= 2) {
      const double prev = report.elbo_trace[report.elbo_trace.size() - 2];
      if (std::abs(value - prev) < config.elbo_rel_tol * std::abs(prev)) {
        report.converged = true;
        break;
      }
    }
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

// Short single-topic fits from independent random starts; returns the
// clusters of the best bound.
ClusterLabels search_initial_clusters(const Corpus& corpus, const HyperConfig& config,
                                      std::vector<double>& elbos) {
  HyperConfig coarse = config;
  coarse.local_topics = 1;
  coarse.global_topics = 1;
  coarse.init_scheme = InitScheme::kRandom;
  coarse.init_restarts = 0;
  coarse.max_em_iters = config.init_restart_iters;
  std::optional<ClusterLabels> best;
  double best_elbo = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.init_restarts; ++r) {
    coarse.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
    FitResult run = fit_from(corpus, coarse, init_model(coarse, corpus));
    const double value = run.report.elbo_trace.back();
    elbos.push_back(value);
    if (!best || value > best_elbo) {
      best_elbo = value;
      best = predict_clusters(run.states);
    }
  }
  return *best;
}

}  // namespace

FitResult fit(const Corpus& corpus, const HyperConfig& config,
              const std::optional<ClusterLabels>& init_labels,
              const IterationCallback& on_iteration) {
  config.validate();
  if (config.init_scheme == InitScheme::kRandom && config.init_restarts > 0 &&
      config.num_clusters > 1 && config.max_em_iters > 0) {
    if (corpus.num_docs() == 0) throw DomainError("fit: empty corpus");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> elbos;
    const ClusterLabels labels = search_initial_clusters(corpus, config, elbos);
    HyperConfig seeded = config;
    seeded.init_scheme = InitScheme::kFromLabels;
    FitResult result = fit_from(corpus, config, init_model(seeded, corpus, labels), on_iteration);
    result.report.init_search_elbos = std::move(elbos);
    result.report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }
  return fit_from(corpus, config, init_model(config, corpus, init_labels), on_iteration);
}

std::vector<DocVariational> infer_states(const Corpus& corpus, const ModelParams& params,
                                         const HyperConfig& config) {
  if (corpus.vocab_size() > params.vocab_size) {
    throw DimensionError("corpus vocabulary (" + std::to_string(corpus.vocab_size()) +
                         ") exceeds the model's (" + std::to_string(params.vocab_size) + ")");
  }
  const PreparedModel model(params);
  const EStepOptions opts{config.e_step_iters, config.e_step_rel_tol};
  std::vector<DocVariational> states(corpus.num_docs());
  parallel::parallel_for(corpus.num_docs(), config.threads, [&](std::size_t d) {
    states[d] = initial_doc_state(corpus.doc(d), params);
    e_step_doc(corpus.doc(d), model, states[d], opts);
  });
  return states;
}

}  // namespace mgctm
