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

// Per-document coordinate ascent and the evidence lower bound.
//
// The bound is taken over an augmented joint in which every cluster owns
// a topic-proportion vector and every word owns a local assignment per
// cluster and a global assignment. Variables the generative process does
// not use get reference distributions: theta_j ~ Dir(1, ..., 1) when j is
// not the document's cluster, z_local ~ Uniform(K) when the word is
// global or the cluster is not the document's, z_global ~ Uniform(R) when
// the word is local. The augmented marginal of w equals the original one.
//
// phi(u, j) is read as q(z_local | delta = 1, eta = j) and phi_g(u) as
// q(z_global | delta = 0); in the other cases q matches the reference, so
// those factors contribute nothing. Assignment terms and their entropies
// are therefore weighted by tau * zeta_j and 1 - tau.

#include <cmath>
#include <limits>
#include <string>

#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"
#include "mgctm/model.hpp"
#include "mgctm/numerics.hpp"

namespace mgctm {
namespace {

using numerics::digamma;
using numerics::xlogx;

struct Expectations {
  std::vector<double> log_theta_local;   // J x K
  std::vector<double> log_theta_global;  // R
  double log_omega = 0;
  double log_one_minus_omega = 0;
};

void expected_log_theta_local(const DocVariational& s, std::vector<double>& out) {
  out.resize(s.mu_local.size());
  const std::size_t K = s.local_topics;
  for (int j = 0; j < s.num_clusters; ++j) {
    numerics::dirichlet_expected_log(s.mu(j), std::span<double>(out.data() + j * K, K));
  }
}

void expected_log_theta_global(const DocVariational& s, std::vector<double>& out) {
  out.resize(s.mu_global.size());
  numerics::dirichlet_expected_log(s.mu_global, out);
}

Expectations expectations(const DocVariational& s) {
  Expectations e;
  expected_log_theta_local(s, e.log_theta_local);
  expected_log_theta_global(s, e.log_theta_global);
  const double total = digamma(s.lambda[0] + s.lambda[1]);
  e.log_omega = digamma(s.lambda[0]) - total;
  e.log_one_minus_omega = digamma(s.lambda[1]) - total;
  return e;
}

void check_shapes(const Document& doc, const PreparedModel& m, const DocVariational& s) {
  if (s.num_clusters != m.J() || s.local_topics != m.K() || s.global_topics != m.R() ||
      s.num_entries != doc.num_entries()) {
    throw DimensionError("document state does not match model or document shape");
  }
}

void softmax(std::span<const double> scores, std::span<double> out) {
  std::copy(scores.begin(), scores.end(), out.begin());
  numerics::log_normalize_inplace(out);
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double f : p) h -= xlogx(f);
  return h;
}

void require_finite(std::span<const double> v, const char* block) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericalError(std::string("non-finite value after ") + block + " update", block);
    }
  }
}

}  // namespace

namespace blocks {

void update_phi_local(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  s.ensure_word_state();
  std::vector<double> elog;
  expected_log_theta_local(s, elog);
  const std::size_t K = s.local_topics;
  std::vector<double> scores(elog.size());
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    kernels::add(elog, model.log_local_topics_for(entries[u].word), scores);
    for (int j = 0; j < s.num_clusters; ++j) {
      softmax(std::span<const double>(scores.data() + j * K, K), s.phi(u, j));
    }
  }
}

void update_phi_global(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  s.ensure_word_state();
  std::vector<double> elog;
  expected_log_theta_global(s, elog);
  std::vector<double> scores(elog.size());
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    kernels::add(elog, model.log_global_topics_for(entries[u].word), scores);
    softmax(scores, s.phi_g(u));
  }
}

void update_tau(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  s.ensure_word_state();
  const Expectations e = expectations(s);
  const std::size_t K = s.local_topics;
  const double prior_odds = e.log_omega - e.log_one_minus_omega;
  std::vector<double> scores(e.log_theta_local.size()), gscores(e.log_theta_global.size());
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    kernels::add(e.log_theta_local, model.log_local_topics_for(entries[u].word), scores);
    kernels::add(e.log_theta_global, model.log_global_topics_for(entries[u].word), gscores);
    double local = 0.0;
    for (int j = 0; j < s.num_clusters; ++j) {
      if (s.zeta[j] == 0.0) continue;
      const auto phi = s.phi(u, j);
      local += s.zeta[j] * (kernels::dot(phi, std::span<const double>(scores.data() + j * K, K)) +
                            entropy(phi));
    }
    const double global = kernels::dot(s.phi_g(u), gscores) + entropy(s.phi_g(u));
    s.tau[u] = 1.0 / (1.0 + std::exp(-(prior_odds + local - global)));
  }
}

void update_mu_local(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  s.ensure_word_state();
  const int K = s.local_topics;
  std::vector<double> counts(s.mu_local.size(), 0.0);
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    const double w = entries[u].count * s.tau[u];
    kernels::axpy(w, std::span<const double>(s.phi_local.data() + u * counts.size(), counts.size()),
                  counts);
  }
  const ModelParams& p = model.params();
  for (int j = 0; j < s.num_clusters; ++j) {
    const double z = s.zeta[j];
    for (int k = 0; k < K; ++k) {
      s.mu(j)[k] = z * p.local_prior(j)[k] + z * counts[j * K + k] + (1.0 - z);
    }
  }
}

void update_mu_global(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  s.ensure_word_state();
  const ModelParams& p = model.params();
  std::copy(p.global_prior.begin(), p.global_prior.end(), s.mu_global.begin());
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    kernels::axpy(entries[u].count * (1.0 - s.tau[u]), s.phi_g(u), s.mu_global);
  }
}

void update_lambda(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  double local = 0.0, global = 0.0;
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    local += entries[u].count * s.tau[u];
    global += entries[u].count * (1.0 - s.tau[u]);
  }
  s.lambda = {model.params().gamma[0] + local, model.params().gamma[1] + global};
}

void update_zeta(const Document& doc, const PreparedModel& model, DocVariational& s) {
  check_shapes(doc, model, s);
  s.ensure_word_state();
  std::vector<double> elog;
  expected_log_theta_local(s, elog);
  const int K = s.local_topics;
  const double log_gamma_k = numerics::log_gamma(static_cast<double>(K));
  const ModelParams& p = model.params();
  std::vector<double> logits(s.num_clusters), scores(elog.size());
  for (int j = 0; j < s.num_clusters; ++j) {
    double acc = model.log_pi(j) + model.local_prior_normalizer(j) - log_gamma_k;
    for (int k = 0; k < K; ++k) acc += (p.local_prior(j)[k] - 1.0) * elog[j * K + k];
    logits[j] = acc;
  }
  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    const double w = entries[u].count * s.tau[u];
    if (w == 0.0) continue;
    kernels::add(elog, model.log_local_topics_for(entries[u].word), scores);
    for (int j = 0; j < s.num_clusters; ++j) {
      const auto phi = s.phi(u, j);
      logits[j] += w * (kernels::dot(phi, std::span<const double>(scores.data() + j * K, K)) +
                        entropy(phi));
    }
  }
  numerics::log_normalize_inplace(logits);
  s.zeta = std::move(logits);
}

}  // namespace blocks

ElboTerms doc_elbo(const Document& doc, const PreparedModel& model, const DocVariational& s) {
  check_shapes(doc, model, s);
  if (!s.has_word_state()) throw ConfigError("doc_elbo needs per-word variational state");
  const ModelParams& p = model.params();
  const Expectations e = expectations(s);
  const int J = s.num_clusters, K = s.local_topics, R = s.global_topics;
  const double log_gamma_k = numerics::log_gamma(static_cast<double>(K));
  ElboTerms t;

  for (int j = 0; j < J; ++j) {
    if (s.zeta[j] > 0.0) t.cluster += s.zeta[j] * model.log_pi(j);
    double prior = model.local_prior_normalizer(j);
    for (int k = 0; k < K; ++k) prior += (p.local_prior(j)[k] - 1.0) * e.log_theta_local[j * K + k];
    t.local_theta_prior += s.zeta[j] * prior + (1.0 - s.zeta[j]) * log_gamma_k;

    double ent = -numerics::dirichlet_log_normalizer(s.mu(j));
    for (int k = 0; k < K; ++k) ent -= (s.mu(j)[k] - 1.0) * e.log_theta_local[j * K + k];
    t.entropy_local_theta += ent;
    t.entropy_cluster -= xlogx(s.zeta[j]);
  }

  t.omega_prior = model.gamma_normalizer() + (p.gamma[0] - 1.0) * e.log_omega +
                  (p.gamma[1] - 1.0) * e.log_one_minus_omega;
  t.entropy_omega = -(numerics::dirichlet_log_normalizer(s.lambda) +
                      (s.lambda[0] - 1.0) * e.log_omega +
                      (s.lambda[1] - 1.0) * e.log_one_minus_omega);

  t.global_theta_prior = model.global_prior_normalizer();
  t.entropy_global_theta = -numerics::dirichlet_log_normalizer(s.mu_global);
  for (int k = 0; k < R; ++k) {
    t.global_theta_prior += (p.global_prior[k] - 1.0) * e.log_theta_global[k];
    t.entropy_global_theta -= (s.mu_global[k] - 1.0) * e.log_theta_global[k];
  }

  const auto& entries = doc.entries();
  for (std::size_t u = 0; u < entries.size(); ++u) {
    const double n = entries[u].count;
    const double tau = s.tau[u];
    const auto log_beta = model.log_local_topics_for(entries[u].word);
    const auto log_beta_g = model.log_global_topics_for(entries[u].word);

    t.indicator += n * (tau * e.log_omega + (1.0 - tau) * e.log_one_minus_omega);
    t.entropy_indicator -= n * (xlogx(tau) + xlogx(1.0 - tau));

    double assign = 0.0, emit = 0.0, ent = 0.0;
    for (int j = 0; j < J; ++j) {
      const auto phi = s.phi(u, j);
      const double weight = tau * s.zeta[j];
      const auto lt = std::span<const double>(e.log_theta_local.data() + j * K, K);
      const auto lb = log_beta.subspan(static_cast<std::size_t>(j) * K, K);
      if (weight == 0.0) continue;
      assign += weight * kernels::dot(phi, lt);
      emit += weight * kernels::dot(phi, lb);
      ent += weight * entropy(phi);
    }
    t.local_assign += n * assign;
    t.emission += n * emit;
    t.entropy_local_assign += n * ent;

    const auto phi_g = s.phi_g(u);
    if (tau < 1.0) {
      t.global_assign += n * (1.0 - tau) * kernels::dot(phi_g, e.log_theta_global);
      t.emission += n * (1.0 - tau) * kernels::dot(phi_g, log_beta_g);
      t.entropy_global_assign += n * (1.0 - tau) * entropy(phi_g);
    }
  }
  return t;
}

int e_step_doc(const Document& doc, const PreparedModel& model, DocVariational& state,
               const EStepOptions& options) {
  check_shapes(doc, model, state);
  state.ensure_word_state();
  double previous = -std::numeric_limits<double>::infinity();
  int round = 0;
  while (round < options.iters) {
    ++round;
    blocks::update_phi_local(doc, model, state);
    require_finite(state.phi_local, "phi_local");
    blocks::update_phi_global(doc, model, state);
    require_finite(state.phi_global, "phi_global");
    blocks::update_tau(doc, model, state);
    require_finite(state.tau, "tau");
    blocks::update_mu_local(doc, model, state);
    require_finite(state.mu_local, "mu_local");
    blocks::update_mu_global(doc, model, state);
    require_finite(state.mu_global, "mu_global");
    blocks::update_lambda(doc, model, state);
    require_finite(state.lambda, "lambda");
    blocks::update_zeta(doc, model, state);
    require_finite(state.zeta, "zeta");
    if (options.rel_tol > 0.0 && round < options.iters) {
      const ElboTerms terms = doc_elbo(doc, model, state);
      const double current = terms.total();
      if (!std::isfinite(current)) {
        throw NumericalError("non-finite document bound: " + terms.describe(), "elbo");
      }
      if (current - previous <= options.rel_tol * std::abs(current)) break;
      previous = current;
    }
  }
  return round;
}

DocVariational e_step_doc(const Document& doc, const ModelParams& params,
                          DocVariational state, int iters) {
  const PreparedModel model(params);
  e_step_doc(doc, model, state, EStepOptions{iters, 0.0});
  return state;
}

ElboTerms elbo_terms(const Corpus& corpus, const std::vector<DocVariational>& states,
                     const ModelParams& params) {
  if (states.size() != corpus.num_docs()) {
    throw DimensionError("need one variational state per document");
  }
  const PreparedModel model(params);
  ElboTerms total;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    total += doc_elbo(corpus.doc(d), model, states[d]);
  }
  const double value = total.total();
  if (!std::isfinite(value)) {
    throw NumericalError("non-finite ELBO: " + total.describe(), "elbo");
  }
  return total;
}

double elbo(const Corpus& corpus, const std::vector<DocVariational>& states,
            const ModelParams& params) {
  return elbo_terms(corpus, states, params).total();
}

}  // namespace mgctm
