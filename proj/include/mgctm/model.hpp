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

#pragma once

// Multi-grain clustering topic model: each document belongs to one of J
// clusters; its words come either from the K local topics owned by that
// cluster or from R global topics shared by every cluster, chosen per
// word by a Bernoulli indicator with a per-document Beta-distributed
// rate. Inference is mean-field variational EM.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgctm/corpus.hpp"
#include "mgctm/eval.hpp"

namespace mgctm {

enum class InitScheme { kRandom, kFromLabels };
enum class PriorUpdate { kEveryIter, kFixed };

struct HyperConfig {
  int num_clusters = 2;
  int local_topics = 5;
  int global_topics = 10;
  int max_em_iters = 100;
  int e_step_iters = 20;
  double elbo_rel_tol = 1e-5;
  // Inner loop stops early once the document bound improves by less.
  double e_step_rel_tol = 1e-8;
  std::uint64_t seed = 1;
  InitScheme init_scheme = InitScheme::kRandom;
  PriorUpdate prior_update = PriorUpdate::kEveryIter;
  int threads = 1;
  // Drop per-word variational state after each E-step pass; only affects
  // memory, never results.
  bool retain_word_state = true;
  // Under random init, fit first runs this many short single-topic fits
  // (K = 1, R = 1) from independent random starts and initializes the
  // full model from the clusters of the one with the highest bound.
  // 0 starts the full model directly from init_model.
  int init_restarts = 8;
  int init_restart_iters = 50;

  // Throws ConfigError.
  void validate() const;
};

// Global parameters. Topic tensors are row-major: local_topics is
// [cluster][topic][word], global_topics is [topic][word].
struct ModelParams {
  int num_clusters = 0;
  int local_topics = 0;
  int global_topics = 0;
  std::size_t vocab_size = 0;

  std::vector<double> pi;
  std::array<double, 2> gamma{1.0, 1.0};
  std::vector<double> local_priors;  // J x K
  std::vector<double> global_prior;  // R
  std::vector<double> local_topic_words;   // J x K x V
  std::vector<double> global_topic_words;  // R x V

  ModelParams() = default;
  ModelParams(int J, int K, int R, std::size_t V);

  std::span<double> local_prior(int j);
  std::span<const double> local_prior(int j) const;
  std::span<double> local_topic(int j, int k);
  std::span<const double> local_topic(int j, int k) const;
  std::span<double> global_topic(int k);
  std::span<const double> global_topic(int k) const;

  // Simplex sums within `tol`, positive priors, finite entries.
  // Throws DomainError naming the first violation.
  void validate(double tol = 1e-9) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Per-document variational state. Word-level fields are indexed by the
// document's distinct-word entries (`u`); tokens sharing a word share
// their factors and are weighted by the entry count.
struct DocVariational {
  int num_clusters = 0;
  int local_topics = 0;
  int global_topics = 0;
  std::size_t num_entries = 0;

  std::vector<double> zeta;                // J
  std::array<double, 2> lambda{1.0, 1.0};  // Beta(lambda) over the local rate
  std::vector<double> mu_local;            // J x K
  std::vector<double> mu_global;           // R
  std::vector<double> tau;                 // U, P(word is local)
  std::vector<double> phi_local;           // U x J x K
  std::vector<double> phi_global;          // U x R

  DocVariational() = default;
  DocVariational(int J, int K, int R, std::size_t U);

  bool has_word_state() const noexcept { return !phi_local.empty(); }
  void release_word_state();
  void ensure_word_state();

  std::span<double> mu(int j) { return {mu_local.data() + j * local_topics, static_cast<std::size_t>(local_topics)}; }
  std::span<const double> mu(int j) const { return {mu_local.data() + j * local_topics, static_cast<std::size_t>(local_topics)}; }
  std::span<double> phi(std::size_t u, int j);
  std::span<const double> phi(std::size_t u, int j) const;
  std::span<double> phi_g(std::size_t u);
  std::span<const double> phi_g(std::size_t u) const;

  void validate(double tol = 1e-9) const;

  friend bool operator==(const DocVariational&, const DocVariational&) = default;
};

// Lower-bound contributions, one field per expectation or entropy.
struct ElboTerms {
  double cluster = 0;             // E log p(eta | pi)
  double omega_prior = 0;         // E log Beta(omega | gamma)
  double local_theta_prior = 0;   // E log p(theta_local | eta, A)
  double global_theta_prior = 0;  // E log Dir(theta_global | alpha_g)
  double indicator = 0;           // E log p(delta | omega)
  double local_assign = 0;        // E log p(z_local | theta, eta, delta)
  double global_assign = 0;       // E log p(z_global | theta_g, delta)
  double emission = 0;            // E log p(w | z, delta, eta, B)
  double entropy_cluster = 0;
  double entropy_omega = 0;
  double entropy_local_theta = 0;
  double entropy_global_theta = 0;
  double entropy_indicator = 0;
  double entropy_local_assign = 0;
  double entropy_global_assign = 0;

  double total() const noexcept;
  ElboTerms& operator+=(const ElboTerms& o) noexcept;
  std::string describe() const;
};

// Read-only derived view of ModelParams used by the E-step: logs of pi
// and of every topic, topics transposed to word-major so one word's
// (cluster, topic) scores are contiguous, and prior normalizers.
class PreparedModel {
 public:
  explicit PreparedModel(const ModelParams& params);

  const ModelParams& params() const noexcept { return *params_; }
  int J() const noexcept { return params_->num_clusters; }
  int K() const noexcept { return params_->local_topics; }
  int R() const noexcept { return params_->global_topics; }

  // J*K values, index j*K + k.
  std::span<const double> log_local_topics_for(WordId w) const;
  std::span<const double> log_global_topics_for(WordId w) const;
  double log_pi(int j) const { return log_pi_[j]; }
  double local_prior_normalizer(int j) const { return local_norm_[j]; }
  double global_prior_normalizer() const noexcept { return global_norm_; }
  double gamma_normalizer() const noexcept { return gamma_norm_; }

 private:
  const ModelParams* params_;
  std::vector<double> log_pi_;
  std::vector<double> log_local_t_;   // V x (J*K)
  std::vector<double> log_global_t_;  // V x R
  std::vector<double> local_norm_;
  double global_norm_ = 0;
  double gamma_norm_ = 0;
};

struct TokenAssignment {
  WordId word = 0;
  bool local = true;  // indicator delta
  int topic = 0;      // local topic of the document's cluster, or global topic
};

struct DocAssignment {
  int cluster = 0;
  double omega = 0;
  std::vector<TokenAssignment> tokens;
};

struct HiddenAssignments {
  std::vector<DocAssignment> docs;
};

struct DocLengthSpec {
  enum class Kind { kFixed, kPoisson };
  Kind kind = Kind::kFixed;
  double value = 100;
};

struct SampledCorpus {
  Corpus corpus;
  HiddenAssignments hidden;
};

// Draws documents from the generative process; deterministic in `seed`.
// Document labels are set to the sampled clusters.
SampledCorpus sample_corpus(const ModelParams& params, std::size_t num_docs,
                            DocLengthSpec doc_length, std::uint64_t seed);

// Ground-truth parameters for synthetic studies: uniform pi, topic rows
// drawn from a symmetric Dirichlet, symmetric priors.
struct GeneratorSpec {
  int num_clusters = 3;
  int local_topics = 3;
  int global_topics = 2;
  std::size_t vocab_size = 50;
  double topic_concentration = 0.1;
  double local_prior = 1.0;
  double global_prior = 1.0;
  std::array<double, 2> gamma{2.0, 1.0};
  std::uint64_t seed = 1;
};
ModelParams random_params(const GeneratorSpec& spec);

struct ModelState {
  ModelParams params;
  std::vector<DocVariational> states;
};

// Uniform pi, unit priors, gamma = (1, 1). Under kRandom, topics are
// perturbed-uniform rows and zeta is a random simplex point. Under
// kFromLabels, zeta puts 0.9 on the given label and spreads 0.1 over the
// rest, and each topic row is blended half and half with the word
// distribution of the cluster's labeled documents (local) or of the whole
// corpus (global). Remaining variational fields start at their symmetric
// values.
ModelState init_model(const HyperConfig& config, const Corpus& corpus,
                      const std::optional<ClusterLabels>& init_labels = {});

// Coordinate block updates. Each one is the exact maximizer of the
// document's lower bound over its block with everything else fixed.
namespace blocks {
void update_phi_local(const Document& doc, const PreparedModel& model, DocVariational& s);
void update_phi_global(const Document& doc, const PreparedModel& model, DocVariational& s);
void update_tau(const Document& doc, const PreparedModel& model, DocVariational& s);
void update_mu_local(const Document& doc, const PreparedModel& model, DocVariational& s);
void update_mu_global(const Document& doc, const PreparedModel& model, DocVariational& s);
void update_lambda(const Document& doc, const PreparedModel& model, DocVariational& s);
void update_zeta(const Document& doc, const PreparedModel& model, DocVariational& s);
}  // namespace blocks

struct EStepOptions {
  int iters = 20;
  double rel_tol = 1e-8;  // <= 0 disables early exit
};

// Cycles phi_local, phi_global, tau, mu_local, mu_global, lambda, zeta.
// Returns the number of rounds run. Throws NumericalError naming the
// block that produced a non-finite bound.
int e_step_doc(const Document& doc, const PreparedModel& model, DocVariational& state,
               const EStepOptions& options);
DocVariational e_step_doc(const Document& doc, const ModelParams& params,
                          DocVariational state, int iters);

ElboTerms doc_elbo(const Document& doc, const PreparedModel& model,
                   const DocVariational& state);
double elbo(const Corpus& corpus, const std::vector<DocVariational>& states,
            const ModelParams& params);
ElboTerms elbo_terms(const Corpus& corpus, const std::vector<DocVariational>& states,
                     const ModelParams& params);

// Expected counts and log statistics gathered from document states.
struct SufficientStats {
  int J = 0, K = 0, R = 0;
  std::size_t V = 0;
  double num_docs = 0;
  std::vector<double> zeta_sum;          // J
  std::vector<double> local_counts;      // J x K x V
  std::vector<double> global_counts;     // R x V
  std::vector<double> local_log_theta;   // J x K, zeta-weighted sum of E log theta
  std::vector<double> global_log_theta;  // R
  std::array<double, 2> log_omega{0, 0}; // sums of E log w, E log (1 - w)

  SufficientStats() = default;
  SufficientStats(int J, int K, int R, std::size_t V);
  void clear();
  void add_doc(const Document& doc, const DocVariational& state);
  void merge(const SufficientStats& other);
};

inline constexpr double kTopicSmoothing = 1e-8;
inline constexpr double kEmptyClusterMass = 1e-6;

struct MStepInfo {
  std::vector<int> empty_clusters;
  std::vector<std::string> prior_warnings;
};

ModelParams m_step(const SufficientStats& stats, const ModelParams& params,
                   const HyperConfig& config, MStepInfo* info = nullptr);
ModelParams m_step(const Corpus& corpus, const std::vector<DocVariational>& states,
                   const ModelParams& params, const HyperConfig& config,
                   MStepInfo* info = nullptr);

struct FitReport {
  // Final bounds of the single-topic initialization runs, if any.
  std::vector<double> init_search_elbos;
  std::vector<double> elbo_trace;
  int iterations_run = 0;
  bool converged = false;
  double wall_time_seconds = 0;
  ElboTerms final_terms;
};

struct FitResult {
  ModelParams params;
  std::vector<DocVariational> states;
  FitReport report;
};

// Slack allowed on ELBO decreases between EM iterations.
inline constexpr double kElboRelativeSlack = 1e-6;

// Alternates parallel E-steps and M-steps until the relative ELBO change
// drops below elbo_rel_tol or max_em_iters is reached. Throws
// NumericalError if the bound decreases by more than the slack.
using IterationCallback = std::function<void(int iteration, double elbo)>;
FitResult fit(const Corpus& corpus, const HyperConfig& config,
              const std::optional<ClusterLabels>& init_labels = {},
              const IterationCallback& on_iteration = {});
FitResult fit_from(const Corpus& corpus, const HyperConfig& config, ModelState start,
                   const IterationCallback& on_iteration = {});

// Uniform zeta, remaining fields at their symmetric values under `params`.
DocVariational initial_doc_state(const Document& doc, const ModelParams& params);

// E-steps every document of `corpus` under fixed `params` (held-out
// inference). Uses e_step_iters, e_step_rel_tol and threads from `config`.
std::vector<DocVariational> infer_states(const Corpus& corpus, const ModelParams& params,
                                         const HyperConfig& config);

int predict_cluster(const DocVariational& state);
ClusterLabels predict_clusters(const std::vector<DocVariational>& states);

enum class TopicScope { kLocal, kGlobal };
struct TopicRef {
  TopicScope scope = TopicScope::kGlobal;
  int cluster = 0;  // local scope only
  int topic = 0;
};

// Word ids by descending probability, ties by ascending id; min(n, V)
// entries. Throws IndexError on an out-of-range topic.
std::vector<WordId> top_words(const ModelParams& params, const TopicRef& ref, std::size_t n);

}  // namespace mgctm
