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

#include <cmath>
#include <random>

#include "doctest.h"
#include "mgctm/baselines.hpp"
#include "mgctm/error.hpp"
#include "mgctm/model.hpp"

using namespace mgctm;

namespace {

SampledCorpus synthetic(std::size_t D, std::uint64_t seed) {
  GeneratorSpec g;
  g.vocab_size = 40;
  g.seed = seed;
  return sample_corpus(random_params(g), D, {DocLengthSpec::Kind::kFixed, 40}, seed + 1);
}

}  // namespace

TEST_CASE("LDA bound is monotone") {
  const auto data = synthetic(80, 2);
  LdaOptions o;
  o.num_topics = 5;
  o.max_iters = 60;
  o.tol = 1e-15;
  const auto m = fit_lda(data.corpus, o);
  REQUIRE(m.elbo_trace.size() >= 50);
  for (std::size_t t = 1; t < m.elbo_trace.size(); ++t) {
    CHECK(m.elbo_trace[t] >= m.elbo_trace[t - 1] - 1e-6 * std::abs(m.elbo_trace[t - 1]));
  }
  CHECK_NOTHROW(m.validate());
  CHECK(m.doc_theta.rows == 80);
  CHECK(m.num_topics() == 5);
}

TEST_CASE("LDA is deterministic across runs and thread counts") {
  const auto data = synthetic(150, 3);
  LdaOptions o;
  o.num_topics = 4;
  o.max_iters = 8;
  const auto a = fit_lda(data.corpus, o);
  const auto b = fit_lda(data.corpus, o);
  CHECK(a.topics.data == b.topics.data);
  o.threads = 3;
  const auto c = fit_lda(data.corpus, o);
  CHECK(a.topics.data == c.topics.data);
  CHECK(a.elbo_trace == c.elbo_trace);
}

TEST_CASE("LDA option validation") {
  const auto data = synthetic(5, 1);
  LdaOptions o;
  o.num_topics = 0;
  CHECK_THROWS_AS(fit_lda(data.corpus, o), ConfigError);
  o = LdaOptions{};
  o.alpha = 0;
  CHECK_THROWS_AS(fit_lda(data.corpus, o), ConfigError);
}

TEST_CASE("naive LDA clustering takes the dominant topic") {
  LdaModel m;
  m.topics = DenseMatrix(3, 2, 0.5);
  m.topic_lambda = DenseMatrix(3, 2, 1.0);
  m.doc_theta = DenseMatrix(2, 3, 1.0);
  m.doc_theta(0, 2) = 5.0;
  m.doc_theta(1, 1) = 3.0;
  const auto l = lda_naive_cluster(m);
  CHECK(l.labels() == std::vector<int>{2, 1});
  CHECK(l.num_clusters() == 3);
  const auto p = topic_proportions(m);
  CHECK(p(0, 2) == doctest::Approx(5.0 / 7.0));
}

TEST_CASE("kmeans separates well separated blobs") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.1);
  DenseMatrix x(90, 2);
  std::vector<int> truth(90);
  const double centers[3][2] = {{0, 0}, {5, 5}, {-5, 5}};
  for (std::size_t i = 0; i < 90; ++i) {
    truth[i] = static_cast<int>(i % 3);
    x(i, 0) = centers[i % 3][0] + noise(rng);
    x(i, 1) = centers[i % 3][1] + noise(rng);
  }
  KMeansOptions o;
  o.k = 3;
  const auto r = kmeans(x, o);
  CHECK(clustering_accuracy(r.labels, ClusterLabels(truth, 3)) == 1.0);
  for (std::size_t t = 1; t < r.cost_trace.size(); ++t) CHECK(r.cost_trace[t] <= r.cost_trace[t - 1] + 1e-12);
  const auto again = kmeans(x, o);
  CHECK(again.labels.labels() == r.labels.labels());
  CHECK(again.cost == r.cost);
  o.k = 91;
  CHECK_THROWS_AS(kmeans(x, o), ConfigError);
  o.k = 0;
  CHECK_THROWS_AS(kmeans(x, o), ConfigError);
}

TEST_CASE("kmeans cost is the within-cluster sum of squares") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  DenseMatrix x(40, 3);
  for (double& v : x.data) v = u(rng);
  KMeansOptions o;
  o.k = 4;
  const auto r = kmeans(x, o);
  double cost = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double d = x(i, c) - r.centroids(r.labels[i], c);
      cost += d * d;
    }
  }
  CHECK(r.cost == doctest::Approx(cost).epsilon(1e-10));
}

TEST_CASE("LDA plus kmeans runs end to end") {
  const auto data = synthetic(60, 4);
  LdaOptions lda;
  lda.num_topics = 6;
  lda.max_iters = 20;
  KMeansOptions km;
  km.k = 3;
  const auto l = lda_kmeans(data.corpus, lda, km);
  CHECK(l.size() == 60);
  CHECK(l.num_clusters() == 3);
  CHECK(lda_kmeans(data.corpus, lda, km).labels() == l.labels());
}
