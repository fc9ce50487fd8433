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
#include <random>

#include "block_checks.hpp"
#include "doctest.h"
#include "mgctm/error.hpp"
#include "mgctm/model.hpp"
#include "oracles.hpp"

using namespace mgctm;

namespace {

SampledCorpus small_synthetic(std::size_t D, double length, std::uint64_t seed) {
  GeneratorSpec g;
  g.vocab_size = 30;
  g.seed = seed;
  return sample_corpus(random_params(g), D, {DocLengthSpec::Kind::kFixed, length}, seed + 100);
}

HyperConfig small_config() {
  HyperConfig c;
  c.num_clusters = 3;
  c.local_topics = 3;
  c.global_topics = 2;
  return c;
}

}  // namespace

TEST_CASE("doc_elbo equals the token-level reference bound") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto shape = oracle::random_shape(seed);
    std::mt19937_64 rng(seed);
    const auto p = oracle::random_small_params(rng, shape.J, shape.K, shape.R, shape.V);
    const auto doc = oracle::random_doc(rng, shape.V, shape.max_doc_length);
    const auto s = oracle::random_state(rng, doc, p);
    const PreparedModel model(p);
    CHECK(doc_elbo(doc, model, s).total() == doctest::Approx(oracle::reference_elbo(doc, p, s)).epsilon(1e-10));
  }
}

TEST_CASE("E-step blocks match numerical maximization") {
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    for (const auto& r : oracle::check_e_blocks(seed)) {
      CAPTURE(seed);
      CAPTURE(r.block);
      if (r.identifiable) CHECK(r.param_err <= 1e-4);
      CHECK(r.elbo_err <= 1e-6);
      CHECK(r.gain >= -1e-12);
    }
  }
}

TEST_CASE("M-step blocks match numerical maximization") {
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    for (const auto& r : oracle::check_m_blocks(seed)) {
      CAPTURE(seed);
      CAPTURE(r.block);
      CHECK(r.param_err <= 1e-4);
      CHECK(r.elbo_err <= 1e-6);
      CHECK(r.gain >= -1e-12);
    }
  }
}

TEST_CASE("every block update keeps the state valid") {
  using Update = void (*)(const Document&, const PreparedModel&, DocVariational&);
  const Update updates[] = {blocks::update_phi_local, blocks::update_phi_global, blocks::update_tau,
                            blocks::update_mu_local,  blocks::update_mu_global,  blocks::update_lambda,
                            blocks::update_zeta};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto shape = oracle::random_shape(seed);
    std::mt19937_64 rng(seed + 500);
    const auto p = oracle::random_small_params(rng, shape.J, shape.K, shape.R, shape.V);
    const auto doc = oracle::random_doc(rng, shape.V, shape.max_doc_length);
    auto s = oracle::random_state(rng, doc, p);
    const PreparedModel model(p);
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (auto u : updates) {
        u(doc, model, s);
        CHECK_NOTHROW(s.validate(1e-9));
      }
    }
  }
}

TEST_CASE("bound never exceeds the exact log-likelihood") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto p = oracle::random_small_params(rng, 2, 1, 1, 3);
    const auto doc = oracle::random_doc(rng, 3, 2);
    const double exact = oracle::exact_log_likelihood_k1r1(doc, p);
    auto s = oracle::random_state(rng, doc, p);
    CHECK(oracle::reference_elbo(doc, p, s) <= exact + 1e-4);
    s = e_step_doc(doc, p, initial_doc_state(doc, p), 200);
    const PreparedModel model(p);
    const double bound = doc_elbo(doc, model, s).total();
    CHECK(bound <= exact + 1e-4);
    CHECK(bound > exact - 5.0);
  }
}

TEST_CASE("EM bound is monotone from random starts") {
  const auto data = small_synthetic(60, 30, 3);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto c = small_config();
    c.seed = seed;
    c.init_restarts = 0;
    c.max_em_iters = 60;
    c.elbo_rel_tol = 1e-15;
    const auto r = fit(data.corpus, c);
    REQUIRE(r.report.elbo_trace.size() >= 50);
    for (std::size_t t = 1; t < r.report.elbo_trace.size(); ++t) {
      const double prev = r.report.elbo_trace[t - 1];
      CHECK(r.report.elbo_trace[t] >= prev - 1e-6 * std::abs(prev));
    }
    CHECK_NOTHROW(r.params.validate());
    for (const auto& s : r.states) CHECK_NOTHROW(s.validate(1e-9));
  }
}

TEST_CASE("M-step output is valid after every iteration") {
  const auto data = small_synthetic(40, 20, 5);
  auto c = small_config();
  c.init_restarts = 0;
  auto state = init_model(c, data.corpus);
  for (int it = 0; it < 15; ++it) {
    const PreparedModel model(state.params);
    for (std::size_t d = 0; d < data.corpus.num_docs(); ++d) {
      e_step_doc(data.corpus.doc(d), model, state.states[d], {c.e_step_iters, c.e_step_rel_tol});
    }
    state.params = m_step(data.corpus, state.states, state.params, c);
    CHECK_NOTHROW(state.params.validate(1e-9));
  }
}

TEST_CASE("fit is deterministic across runs and thread counts") {
  const auto data = small_synthetic(200, 20, 7);
  auto c = small_config();
  c.max_em_iters = 10;
  c.init_restarts = 2;
  c.init_restart_iters = 5;
  const auto a = fit(data.corpus, c);
  const auto b = fit(data.corpus, c);
  CHECK(a.params == b.params);
  CHECK(a.report.elbo_trace == b.report.elbo_trace);
  c.threads = 3;
  const auto t = fit(data.corpus, c);
  CHECK(a.params == t.params);
  CHECK(a.states == t.states);
  CHECK(a.report.elbo_trace == t.report.elbo_trace);
}

TEST_CASE("fit is equivariant under cluster relabeling") {
  const auto data = small_synthetic(50, 25, 11);
  auto c = small_config();
  c.init_restarts = 0;
  c.max_em_iters = 15;
  c.elbo_rel_tol = 1e-15;
  const auto start = init_model(c, data.corpus);
  const std::vector<int> perm{2, 0, 1};
  const auto plain = fit_from(data.corpus, c, start);
  const auto relabeled = fit_from(data.corpus, c, oracle::permute_clusters(start, perm));
  const auto expect = oracle::permute_clusters({plain.params, plain.states}, perm);
  REQUIRE(plain.report.elbo_trace.size() == relabeled.report.elbo_trace.size());
  for (std::size_t t = 0; t < plain.report.elbo_trace.size(); ++t) {
    CHECK(relabeled.report.elbo_trace[t] ==
          doctest::Approx(plain.report.elbo_trace[t]).epsilon(1e-10));
  }
  for (std::size_t i = 0; i < expect.params.local_topic_words.size(); ++i) {
    CHECK(std::abs(expect.params.local_topic_words[i] - relabeled.params.local_topic_words[i]) <= 1e-8);
  }
  for (std::size_t j = 0; j < expect.params.pi.size(); ++j) {
    CHECK(std::abs(expect.params.pi[j] - relabeled.params.pi[j]) <= 1e-8);
  }
  for (std::size_t d = 0; d < plain.states.size(); ++d) {
    CHECK(predict_cluster(relabeled.states[d]) == perm[predict_cluster(plain.states[d])]);
  }
}

TEST_CASE("synthetic recovery on a small corpus") {
  GeneratorSpec g;
  g.seed = 1;
  const auto data = sample_corpus(random_params(g), 150, {DocLengthSpec::Kind::kFixed, 80}, 2);
  auto c = small_config();
  const auto r = fit(data.corpus, c);
  const auto truth = ClusterLabels(data.corpus.labels(), 3);
  CHECK(clustering_accuracy(predict_clusters(r.states), truth) >= 0.9);
}

TEST_CASE("sampler is deterministic and consistent with its hidden draws") {
  GeneratorSpec g;
  g.vocab_size = 20;
  const auto p = random_params(g);
  CHECK_NOTHROW(p.validate());
  CHECK(random_params(g) == p);
  const DocLengthSpec len{DocLengthSpec::Kind::kPoisson, 15};
  const auto a = sample_corpus(p, 30, len, 9);
  const auto b = sample_corpus(p, 30, len, 9);
  CHECK(a.corpus == b.corpus);
  REQUIRE(a.hidden.docs.size() == a.corpus.num_docs());
  for (std::size_t d = 0; d < a.corpus.num_docs(); ++d) {
    const auto& h = a.hidden.docs[d];
    std::vector<WordId> words;
    for (const auto& t : h.tokens) {
      words.push_back(t.word);
      CHECK(t.topic >= 0);
      CHECK(t.topic < (t.local ? p.local_topics : p.global_topics));
    }
    CHECK(Document::from_tokens(words, h.cluster) == a.corpus.doc(d));
    CHECK(h.omega > 0.0);
    CHECK(h.omega < 1.0);
  }
  CHECK_THROWS_AS(sample_corpus(p, 0, len, 1), ConfigError);
}

TEST_CASE("top words") {
  ModelParams p(1, 2, 1, 5);
  std::fill(p.pi.begin(), p.pi.end(), 1.0);
  std::fill(p.local_topic_words.begin(), p.local_topic_words.end(), 0.2);
  std::fill(p.global_topic_words.begin(), p.global_topic_words.end(), 0.0);
  p.global_topic_words[3] = 1.0;
  CHECK(top_words(p, {TopicScope::kGlobal, 0, 0}, 1) == std::vector<WordId>{3});
  CHECK(top_words(p, {TopicScope::kLocal, 0, 1}, 3) == std::vector<WordId>{0, 1, 2});
  CHECK(top_words(p, {TopicScope::kLocal, 0, 1}, 99).size() == 5);
  CHECK_THROWS_AS(top_words(p, {TopicScope::kLocal, 1, 0}, 3), IndexError);
  CHECK_THROWS_AS(top_words(p, {TopicScope::kGlobal, 0, 1}, 3), IndexError);
}

TEST_CASE("configuration and initialization errors") {
  HyperConfig c;
  c.global_topics = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = HyperConfig{};
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto data = small_synthetic(10, 10, 2);
  auto k = small_config();
  k.init_scheme = InitScheme::kFromLabels;
  CHECK_THROWS_AS(init_model(k, data.corpus), ConfigError);
  CHECK_THROWS_AS(init_model(k, data.corpus, ClusterLabels(std::vector<int>(9, 0), 3)), ConfigError);
  CHECK_THROWS_AS(init_model(k, data.corpus, ClusterLabels(std::vector<int>(10, 3), 4)), ConfigError);
  const auto ok = init_model(k, data.corpus, ClusterLabels(data.corpus.labels(), 3));
  for (std::size_t d = 0; d < 10; ++d) CHECK(predict_cluster(ok.states[d]) == data.corpus.labels()[d]);
}

TEST_CASE("zero iterations return the initial state") {
  const auto data = small_synthetic(10, 10, 2);
  auto c = small_config();
  c.max_em_iters = 0;
  const auto r = fit(data.corpus, c);
  const auto init = init_model(c, data.corpus);
  CHECK(r.params == init.params);
  CHECK(r.report.elbo_trace.empty());
  CHECK(r.report.iterations_run == 0);
}

TEST_CASE("inference on new documents") {
  const auto data = small_synthetic(60, 40, 4);
  auto c = small_config();
  c.max_em_iters = 30;
  const auto r = fit(data.corpus, c);
  const auto states = infer_states(data.corpus, r.params, c);
  REQUIRE(states.size() == 60);
  int agree = 0;
  for (std::size_t d = 0; d < 60; ++d) {
    CHECK_NOTHROW(states[d].validate(1e-9));
    agree += predict_cluster(states[d]) == predict_cluster(r.states[d]);
  }
  CHECK(agree >= 54);
  const Corpus wide({Document::from_tokens({40})}, 41);
  CHECK_THROWS_AS(infer_states(wide, r.params, c), DimensionError);
}
