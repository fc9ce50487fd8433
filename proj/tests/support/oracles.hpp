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

// Independent reference implementations used to check the library. None
// of these call into the model code; special functions come from Boost.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mgctm/corpus.hpp"
#include "mgctm/model.hpp"

namespace oracle {

// Lower bound for one document, evaluated token by token (every copy of a
// word gets its own factors, copied from the word's entry).
double reference_elbo(const mgctm::Document& doc, const mgctm::ModelParams& p,
                      const mgctm::DocVariational& s);
double reference_elbo(const mgctm::Corpus& corpus, const mgctm::ModelParams& p,
                      const std::vector<mgctm::DocVariational>& states);

// log p(w | params) for one document with K = 1 and R = 1, summing over
// clusters and indicators and integrating omega by adaptive quadrature.
double exact_log_likelihood_k1r1(const mgctm::Document& doc, const mgctm::ModelParams& p);

// Damped Newton ascent with finite-difference derivatives. Returns the
// maximizer; `f` is called on unconstrained coordinates.
std::vector<double> maximize(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, int max_iters = 200);

// Maps between a simplex point and logits with the last entry pinned at 0.
std::vector<double> simplex_to_logits(const std::vector<double>& p);
std::vector<double> logits_to_simplex(const double* logits, std::size_t n);

// Brute force clustering metrics.
double brute_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);
double direct_nmi(const std::vector<int>& pred, const std::vector<int>& truth);

// Beta maximum likelihood on a grid with spacing `step`: each parameter
// is gridded with the other profiled out.
std::pair<double, double> beta_grid_mle(double mean_log_x, double mean_log_1mx, double step,
                                        double lo, double hi);

// Random small instances.
mgctm::ModelParams random_small_params(std::mt19937_64& rng, int J, int K, int R, std::size_t V);
mgctm::Document random_doc(std::mt19937_64& rng, std::size_t V, int length);
mgctm::DocVariational random_state(std::mt19937_64& rng, const mgctm::Document& doc,
                                   const mgctm::ModelParams& p);

// Relabels clusters: new cluster perm[j] takes old cluster j.
mgctm::ModelState permute_clusters(const mgctm::ModelState& in, const std::vector<int>& perm);

}  // namespace oracle
