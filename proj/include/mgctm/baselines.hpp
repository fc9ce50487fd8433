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

// Comparison pipelines: variational LDA, LDA+Naive, K-means and
// LDA+Kmeans.

#include <cstdint>
#include <vector>

#include "mgctm/corpus.hpp"
#include "mgctm/eval.hpp"
#include "mgctm/matrix.hpp"

namespace mgctm {

struct LdaOptions {
  int num_topics = 60;
  double alpha = 0.1;  // symmetric document-topic prior
  double eta = 0.01;   // symmetric topic-word prior
  int max_iters = 100;
  double tol = 1e-5;   // relative ELBO change
  int e_step_iters = 50;
  double e_step_tol = 1e-6;  // largest relative change of a gamma entry
  std::uint64_t seed = 1;
  int threads = 1;

  // Throws ConfigError.
  void validate() const;
};

// Smoothed LDA: q(beta_t) = Dir(topic_lambda row t), q(theta_d) =
// Dir(doc_theta row d). `topics` holds E[beta] under q.
struct LdaModel {
  double alpha = 0.1;
  double eta = 0.01;
  DenseMatrix topics;        // T x V, rows sum to 1
  DenseMatrix topic_lambda;  // T x V
  DenseMatrix doc_theta;     // D x T, > 0

  std::vector<double> elbo_trace;
  int iterations_run = 0;
  bool converged = false;

  int num_topics() const noexcept { return static_cast<int>(topics.rows); }
  std::size_t vocab_size() const noexcept { return topics.cols; }
  // Throws DomainError on a broken invariant.
  void validate(double tol = 1e-9) const;
};

// Mean-field variational EM. Deterministic given the seed, independent
// of the thread count. Throws NumericalError if the bound decreases by
// more than the relative slack shared with the MGCTM fit.
LdaModel fit_lda(const Corpus& corpus, const LdaOptions& options);

// Per-document argmax of the topic proportions; lowest index on ties.
ClusterLabels lda_naive_cluster(const LdaModel& model);

// Rows of doc_theta normalized to proportions.
DenseMatrix topic_proportions(const LdaModel& model);

struct KMeansOptions {
  int k = 2;
  std::uint64_t seed = 1;
  int max_iters = 100;
  int restarts = 10;

  void validate() const;
};

struct KMeansResult {
  ClusterLabels labels;
  DenseMatrix centroids;
  double cost = 0;  // within-cluster sum of squares
  // Cost after each assignment step of the winning restart.
  std::vector<double> cost_trace;
  int iterations = 0;
};

// Lloyd iterations from k-means++ seeds; the restart with the lowest cost
// wins (earliest on ties). A cluster that empties is re-seeded from the
// point farthest from its centroid among clusters with several members.
// Throws ConfigError when k is outside [1, rows].
KMeansResult kmeans(const DenseMatrix& vectors, const KMeansOptions& options);

// fit_lda, then K-means on the normalized topic proportions.
ClusterLabels lda_kmeans(const Corpus& corpus, const LdaOptions& lda,
                         const KMeansOptions& km);

}  // namespace mgctm
