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
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"
#include "mgctm/model.hpp"
#include "mgctm/numerics.hpp"
#include "random.hpp"

namespace mgctm {

void HyperConfig::validate() const {
  if (num_clusters < 1) throw ConfigError("num_clusters must be >= 1");
  if (local_topics < 1) throw ConfigError("local_topics must be >= 1");
  if (global_topics < 1) {
    throw ConfigError("global_topics must be >= 1: words can always be routed to the global pathway");
  }
  if (max_em_iters < 0) throw ConfigError("max_em_iters must be >= 0");
  if (e_step_iters < 1) throw ConfigError("e_step_iters must be >= 1");
  if (!(elbo_rel_tol > 0.0)) throw ConfigError("elbo_rel_tol must be positive");
  if (!(e_step_rel_tol > 0.0)) throw ConfigError("e_step_rel_tol must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (init_restarts < 0) throw ConfigError("init_restarts must be >= 0");
  if (init_restart_iters < 1) throw ConfigError("init_restart_iters must be >= 1");
}

ModelParams::ModelParams(int J, int K, int R, std::size_t V)
    : num_clusters(J),
      local_topics(K),
      global_topics(R),
      vocab_size(V),
      pi(J, 1.0 / J),
      local_priors(static_cast<std::size_t>(J) * K, 1.0),
      global_prior(R, 1.0),
      local_topic_words(static_cast<std::size_t>(J) * K * V, V ? 1.0 / V : 0.0),
      global_topic_words(static_cast<std::size_t>(R) * V, V ? 1.0 / V : 0.0) {}

std::span<double> ModelParams::local_prior(int j) {
  return {local_priors.data() + static_cast<std::size_t>(j) * local_topics,
          static_cast<std::size_t>(local_topics)};
}
std::span<const double> ModelParams::local_prior(int j) const {
  return {local_priors.data() + static_cast<std::size_t>(j) * local_topics,
          static_cast<std::size_t>(local_topics)};
}
std::span<double> ModelParams::local_topic(int j, int k) {
  return {local_topic_words.data() + (static_cast<std::size_t>(j) * local_topics + k) * vocab_size,
          vocab_size};
}
std::span<const double> ModelParams::local_topic(int j, int k) const {
  return {local_topic_words.data() + (static_cast<std::size_t>(j) * local_topics + k) * vocab_size,
          vocab_size};
}
std::span<double> ModelParams::global_topic(int k) {
  return {global_topic_words.data() + static_cast<std::size_t>(k) * vocab_size, vocab_size};
}
std::span<const double> ModelParams::global_topic(int k) const {
  return {global_topic_words.data() + static_cast<std::size_t>(k) * vocab_size, vocab_size};
}

namespace {

void check_simplex(std::span<const double> v, double tol, const std::string& what) {
  double s = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError(what + ": negative or non-finite entry");
    s += x;
  }
  if (std::abs(s - 1.0) > tol) {
    throw DomainError(what + ": sums to " + std::to_string(s) + ", not 1");
  }
}

void check_positive(std::span<const double> v, const std::string& what) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(what + ": entries must be positive");
  }
}

}  // namespace

void ModelParams::validate(double tol) const {
  const auto J = static_cast<std::size_t>(num_clusters);
  const auto K = static_cast<std::size_t>(local_topics);
  const auto R = static_cast<std::size_t>(global_topics);
  if (num_clusters < 1 || local_topics < 1 || global_topics < 0) {
    throw DomainError("model dimensions must be positive");
  }
  if (pi.size() != J || local_priors.size() != J * K || global_prior.size() != R ||
      local_topic_words.size() != J * K * vocab_size ||
      global_topic_words.size() != R * vocab_size) {
    throw DimensionError("model parameter arrays do not match dimensions");
  }
  check_simplex(pi, tol, "pi");
  check_positive(gamma, "gamma");
  check_positive(local_priors, "local priors");
  check_positive(global_prior, "global prior");
  for (int j = 0; j < num_clusters; ++j) {
    for (int k = 0; k < local_topics; ++k) {
      check_simplex(local_topic(j, k), tol,
                    "local topic (" + std::to_string(j) + "," + std::to_string(k) + ")");
    }
  }
  for (int k = 0; k < global_topics; ++k) {
    check_simplex(global_topic(k), tol, "global topic " + std::to_string(k));
  }
}

DocVariational::DocVariational(int J, int K, int R, std::size_t U)
    : num_clusters(J),
      local_topics(K),
      global_topics(R),
      num_entries(U),
      zeta(J, 1.0 / J),
      mu_local(static_cast<std::size_t>(J) * K, 1.0),
      mu_global(R, 1.0),
      tau(U, 0.5),
      phi_local(U * J * K, 1.0 / K),
      phi_global(U * R, R ? 1.0 / R : 0.0) {}

void DocVariational::release_word_state() {
  std::vector<double>().swap(phi_local);
  std::vector<double>().swap(phi_global);
}

void DocVariational::ensure_word_state() {
  const std::size_t JK = static_cast<std::size_t>(num_clusters) * local_topics;
  if (phi_local.size() != num_entries * JK) phi_local.assign(num_entries * JK, 1.0 / local_topics);
  if (phi_global.size() != num_entries * global_topics) {
    phi_global.assign(num_entries * global_topics, 1.0 / global_topics);
  }
}

std::span<double> DocVariational::phi(std::size_t u, int j) {
  const std::size_t K = local_topics;
  return {phi_local.data() + (u * num_clusters + j) * K, K};
}
std::span<const double> DocVariational::phi(std::size_t u, int j) const {
  const std::size_t K = local_topics;
  return {phi_local.data() + (u * num_clusters + j) * K, K};
}
std::span<double> DocVariational::phi_g(std::size_t u) {
  const std::size_t R = global_topics;
  return {phi_global.data() + u * R, R};
}
std::span<const double> DocVariational::phi_g(std::size_t u) const {
  const std::size_t R = global_topics;
  return {phi_global.data() + u * R, R};
}

void DocVariational::validate(double tol) const {
  check_simplex(zeta, tol, "zeta");
  check_positive(lambda, "lambda");
  check_positive(mu_local, "mu_local");
  check_positive(mu_global, "mu_global");
  for (double t : tau) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("tau outside [0, 1]");
  }
  if (!has_word_state()) return;
  for (std::size_t u = 0; u < num_entries; ++u) {
    for (int j = 0; j < num_clusters; ++j) check_simplex(phi(u, j), tol, "phi_local");
    check_simplex(phi_g(u), tol, "phi_global");
  }
}

double ElboTerms::total() const noexcept {
  return cluster + omega_prior + local_theta_prior + global_theta_prior + indicator +
         local_assign + global_assign + emission + entropy_cluster + entropy_omega +
         entropy_local_theta + entropy_global_theta + entropy_indicator +
         entropy_local_assign + entropy_global_assign;
}

ElboTerms& ElboTerms::operator+=(const ElboTerms& o) noexcept {
  cluster += o.cluster;
  omega_prior += o.omega_prior;
  local_theta_prior += o.local_theta_prior;
  global_theta_prior += o.global_theta_prior;
  indicator += o.indicator;
  local_assign += o.local_assign;
  global_assign += o.global_assign;
  emission += o.emission;
  entropy_cluster += o.entropy_cluster;
  entropy_omega += o.entropy_omega;
  entropy_local_theta += o.entropy_local_theta;
  entropy_global_theta += o.entropy_global_theta;
  entropy_indicator += o.entropy_indicator;
  entropy_local_assign += o.entropy_local_assign;
  entropy_global_assign += o.entropy_global_assign;
  return *this;
}

std::string ElboTerms::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << "cluster=" << cluster << " omega_prior=" << omega_prior
      << " local_theta_prior=" << local_theta_prior
      << " global_theta_prior=" << global_theta_prior << " indicator=" << indicator
      << " local_assign=" << local_assign << " global_assign=" << global_assign
      << " emission=" << emission << " H(cluster)=" << entropy_cluster
      << " H(omega)=" << entropy_omega << " H(local_theta)=" << entropy_local_theta
      << " H(global_theta)=" << entropy_global_theta << " H(indicator)=" << entropy_indicator
      << " H(local_assign)=" << entropy_local_assign
      << " H(global_assign)=" << entropy_global_assign << " total=" << total();
  return out.str();
}

namespace {

// Zero probabilities would give -inf scores; they are floored in log space.
constexpr double kLogFloor = -690.0;  // ~ log(1e-300)

double safe_log(double x) { return x > 0.0 ? std::max(std::log(x), kLogFloor) : kLogFloor; }

}  // namespace

PreparedModel::PreparedModel(const ModelParams& params) : params_(&params) {
  const std::size_t J = params.num_clusters, K = params.local_topics,
                    R = params.global_topics, V = params.vocab_size;
  log_pi_.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    log_pi_[j] = params.pi[j] > 0.0 ? std::log(params.pi[j])
                                    : -std::numeric_limits<double>::infinity();
  }
  log_local_t_.resize(V * J * K);
  for (std::size_t jk = 0; jk < J * K; ++jk) {
    const double* row = params.local_topic_words.data() + jk * V;
    for (std::size_t v = 0; v < V; ++v) log_local_t_[v * J * K + jk] = safe_log(row[v]);
  }
  log_global_t_.resize(V * R);
  for (std::size_t k = 0; k < R; ++k) {
    const double* row = params.global_topic_words.data() + k * V;
    for (std::size_t v = 0; v < V; ++v) log_global_t_[v * R + k] = safe_log(row[v]);
  }
  local_norm_.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    local_norm_[j] = numerics::dirichlet_log_normalizer(params.local_prior(static_cast<int>(j)));
  }
  global_norm_ = R ? numerics::dirichlet_log_normalizer(params.global_prior) : 0.0;
  gamma_norm_ = numerics::dirichlet_log_normalizer(params.gamma);
}

std::span<const double> PreparedModel::log_local_topics_for(WordId w) const {
  const std::size_t JK = static_cast<std::size_t>(J()) * K();
  return {log_local_t_.data() + w * JK, JK};
}

std::span<const double> PreparedModel::log_global_topics_for(WordId w) const {
  const std::size_t R = static_cast<std::size_t>(this->R());
  return {log_global_t_.data() + w * R, R};
}

namespace {

constexpr double kInitTopicNoise = 0.5;
constexpr double kSeedWeight = 0.5;

void perturbed_uniform(Rng& rng, std::span<double> row) {
  const double V = static_cast<double>(row.size());
  std::vector<double> noise(row.size());
  sample_dirichlet_symmetric(rng, 1.0, noise);
  for (std::size_t v = 0; v < row.size(); ++v) {
    row[v] = (1.0 - kInitTopicNoise) / V + kInitTopicNoise * noise[v];
  }
  kernels::scale(row, 1.0 / kernels::sum(row));
}

// Word distribution of a weighted set of documents.
std::vector<double> word_distribution(const Corpus& corpus, std::span<const double> weights) {
  std::vector<double> out(corpus.vocab_size(), 0.0);
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    if (weights[d] == 0.0) continue;
    for (const auto& e : corpus.doc(d).entries()) out[e.word] += weights[d] * e.count;
  }
  const double total = kernels::sum(out);
  if (total > 0.0) kernels::scale(out, 1.0 / total);
  return out;
}

void seeded_row(Rng& rng, std::span<const double> base, std::span<double> row) {
  perturbed_uniform(rng, row);
  for (std::size_t v = 0; v < row.size(); ++v) {
    row[v] = (1.0 - kSeedWeight) * row[v] + kSeedWeight * base[v];
  }
  kernels::scale(row, 1.0 / kernels::sum(row));
}

void symmetric_doc_state(const Document& doc, const ModelParams& p, DocVariational& s) {
  const int J = p.num_clusters, K = p.local_topics, R = p.global_topics;
  const double tau0 = p.gamma[0] / (p.gamma[0] + p.gamma[1]);
  const double n = static_cast<double>(doc.length());
  std::fill(s.tau.begin(), s.tau.end(), tau0);
  std::fill(s.phi_local.begin(), s.phi_local.end(), 1.0 / K);
  std::fill(s.phi_global.begin(), s.phi_global.end(), 1.0 / R);
  for (int j = 0; j < J; ++j) {
    const double z = s.zeta[j];
    for (int k = 0; k < K; ++k) {
      s.mu(j)[k] = z * p.local_prior(j)[k] + z * tau0 * n / K + 1.0 - z;
    }
  }
  for (int k = 0; k < R; ++k) s.mu_global[k] = p.global_prior[k] + (1.0 - tau0) * n / R;
  s.lambda = {p.gamma[0] + tau0 * n, p.gamma[1] + (1.0 - tau0) * n};
}

}  // namespace

ModelState init_model(const HyperConfig& config, const Corpus& corpus,
                      const std::optional<ClusterLabels>& init_labels) {
  config.validate();
  const int J = config.num_clusters, K = config.local_topics, R = config.global_topics;
  const std::size_t V = corpus.vocab_size();
  if (config.init_scheme == InitScheme::kFromLabels) {
    if (!init_labels) throw ConfigError("init scheme from_labels needs labels");
    if (init_labels->size() != corpus.num_docs()) {
      throw ConfigError("init labels cover " + std::to_string(init_labels->size()) +
                        " documents, corpus has " + std::to_string(corpus.num_docs()));
    }
    for (int l : init_labels->labels()) {
      if (l < 0 || l >= J) {
        throw ConfigError("init label " + std::to_string(l) + " outside [0, " +
                          std::to_string(J) + ")");
      }
    }
  }

  Rng rng(config.seed);
  ModelState out{ModelParams(J, K, R, V), {}};
  ModelParams& p = out.params;
  const std::size_t D = corpus.num_docs();
  if (config.init_scheme == InitScheme::kFromLabels) {
    // Each cluster's topics lean toward the words of its labeled documents
    // and the global topics toward the whole corpus; with plain
    // perturbed-uniform topics the first E-step would discard the labels.
    for (int j = 0; j < J; ++j) {
      std::vector<double> weights(D, 0.0);
      for (std::size_t d = 0; d < D; ++d) weights[d] = (*init_labels)[d] == j ? 1.0 : 0.0;
      const auto base = word_distribution(corpus, weights);
      for (int k = 0; k < K; ++k) seeded_row(rng, base, p.local_topic(j, k));
    }
    const auto base = word_distribution(corpus, std::vector<double>(D, 1.0));
    for (int k = 0; k < R; ++k) seeded_row(rng, base, p.global_topic(k));
  } else {
    for (int j = 0; j < J; ++j) {
      for (int k = 0; k < K; ++k) perturbed_uniform(rng, p.local_topic(j, k));
    }
    for (int k = 0; k < R; ++k) perturbed_uniform(rng, p.global_topic(k));
  }

  out.states.reserve(corpus.num_docs());
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    const Document& doc = corpus.doc(d);
    DocVariational s(J, K, R, doc.num_entries());
    if (J == 1) {
      s.zeta[0] = 1.0;
    } else if (config.init_scheme == InitScheme::kFromLabels) {
      std::fill(s.zeta.begin(), s.zeta.end(), 0.1 / (J - 1));
      s.zeta[(*init_labels)[d]] = 0.9;
    } else {
      sample_dirichlet_symmetric(rng, 1.0, s.zeta);
    }
    symmetric_doc_state(doc, p, s);
    out.states.push_back(std::move(s));
  }
  return out;
}

DocVariational initial_doc_state(const Document& doc, const ModelParams& params) {
  DocVariational s(params.num_clusters, params.local_topics, params.global_topics, doc.num_entries());
  symmetric_doc_state(doc, params, s);
  return s;
}

ModelParams random_params(const GeneratorSpec& spec) {
  if (spec.num_clusters < 1 || spec.local_topics < 1 || spec.global_topics < 1 ||
      spec.vocab_size < 1) {
    throw ConfigError("generator needs J, K, R, V >= 1");
  }
  if (!(spec.topic_concentration > 0) || !(spec.local_prior > 0) || !(spec.global_prior > 0) ||
      !(spec.gamma[0] > 0) || !(spec.gamma[1] > 0)) {
    throw ConfigError("generator concentrations must be positive");
  }
  ModelParams p(spec.num_clusters, spec.local_topics, spec.global_topics, spec.vocab_size);
  Rng rng(spec.seed);
  std::fill(p.local_priors.begin(), p.local_priors.end(), spec.local_prior);
  std::fill(p.global_prior.begin(), p.global_prior.end(), spec.global_prior);
  p.gamma = spec.gamma;
  for (int j = 0; j < p.num_clusters; ++j) {
    for (int k = 0; k < p.local_topics; ++k) {
      sample_dirichlet_symmetric(rng, spec.topic_concentration, p.local_topic(j, k));
    }
  }
  for (int k = 0; k < p.global_topics; ++k) {
    sample_dirichlet_symmetric(rng, spec.topic_concentration, p.global_topic(k));
  }
  return p;
}

SampledCorpus sample_corpus(const ModelParams& params, std::size_t num_docs,
                            DocLengthSpec doc_length, std::uint64_t seed) {
  params.validate();
  if (num_docs == 0) throw ConfigError("num_docs must be >= 1");
  if (params.global_topics < 1) {
    throw ConfigError("sampling needs at least one global topic: Beta(gamma) admits delta = 0");
  }
  if (!(doc_length.value >= 1.0)) throw ConfigError("document length must be >= 1");
  const int J = params.num_clusters, K = params.local_topics, R = params.global_topics;

  CategoricalTable cluster_table(params.pi);
  std::vector<CategoricalTable> local_tables, global_tables;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) local_tables.emplace_back(params.local_topic(j, k));
  }
  for (int k = 0; k < R; ++k) global_tables.emplace_back(params.global_topic(k));

  Rng rng(seed);
  std::poisson_distribution<long> poisson(doc_length.value);
  SampledCorpus out;
  std::vector<Document> docs;
  docs.reserve(num_docs);
  std::vector<double> theta_local(K), theta_global(R), omega_pair(2);
  for (std::size_t d = 0; d < num_docs; ++d) {
    DocAssignment a;
    a.cluster = cluster_table.sample(rng);
    sample_dirichlet(rng, params.local_prior(a.cluster), theta_local);
    sample_dirichlet(rng, params.global_prior, theta_global);
    sample_dirichlet(rng, params.gamma, omega_pair);
    a.omega = omega_pair[0];
    std::size_t n = static_cast<std::size_t>(doc_length.value);
    if (doc_length.kind == DocLengthSpec::Kind::kPoisson) {
      long draw = 0;
      while (draw < 1) draw = poisson(rng);
      n = static_cast<std::size_t>(draw);
    }
    CategoricalTable local_mix(theta_local), global_mix(theta_global);
    std::vector<WordId> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      TokenAssignment t;
      t.local = uniform01(rng) < a.omega;
      if (t.local) {
        t.topic = local_mix.sample(rng);
        t.word = static_cast<WordId>(local_tables[a.cluster * K + t.topic].sample(rng));
      } else {
        t.topic = global_mix.sample(rng);
        t.word = static_cast<WordId>(global_tables[t.topic].sample(rng));
      }
      tokens.push_back(t.word);
      a.tokens.push_back(t);
    }
    docs.push_back(Document::from_tokens(tokens, a.cluster));
    out.hidden.docs.push_back(std::move(a));
  }
  out.corpus = Corpus(std::move(docs), params.vocab_size);
  return out;
}

int predict_cluster(const DocVariational& state) { return argmax(state.zeta); }

ClusterLabels predict_clusters(const std::vector<DocVariational>& states) {
  std::vector<int> labels;
  labels.reserve(states.size());
  int J = 0;
  for (const auto& s : states) {
    labels.push_back(predict_cluster(s));
    J = std::max(J, s.num_clusters);
  }
  return ClusterLabels(std::move(labels), J);
}

std::vector<WordId> top_words(const ModelParams& params, const TopicRef& ref, std::size_t n) {
  std::span<const double> row;
  if (ref.scope == TopicScope::kLocal) {
    if (ref.cluster < 0 || ref.cluster >= params.num_clusters || ref.topic < 0 ||
        ref.topic >= params.local_topics) {
      throw IndexError("local topic (" + std::to_string(ref.cluster) + ", " +
                       std::to_string(ref.topic) + ") out of range");
    }
    row = params.local_topic(ref.cluster, ref.topic);
  } else {
    if (ref.topic < 0 || ref.topic >= params.global_topics) {
      throw IndexError("global topic " + std::to_string(ref.topic) + " out of range");
    }
    row = params.global_topic(ref.topic);
  }
  std::vector<WordId> ids(row.size());
  std::iota(ids.begin(), ids.end(), WordId{0});
  const std::size_t m = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(m), ids.end(),
                    [&](WordId a, WordId b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
  ids.resize(m);
  return ids;
}

}  // namespace mgctm
