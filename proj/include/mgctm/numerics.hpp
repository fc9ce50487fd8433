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

#include <span>
#include <vector>

namespace mgctm::numerics {

// Special functions. All require x > 0 and throw DomainError otherwise.
// Absolute error is below 1e-10 for x >= 1e-4 (relative 1e-14 once the
// value itself exceeds 1e4 in magnitude).
double digamma(double x);
double trigamma(double x);
double log_gamma(double x);

// x * log(x) with the 0 * log 0 = 0 convention.
double xlogx(double x);

// log(sum(exp(v))). Throws DegeneracyError if every entry is -inf.
double log_sum_exp(std::span<const double> log_weights);

// exp-normalizes log weights onto the simplex via max subtraction.
// Throws DegeneracyError when all entries are -inf, DomainError on NaN/+inf.
std::vector<double> log_normalize(std::span<const double> log_weights);
void log_normalize_inplace(std::span<double> log_weights);

// E[log p_k] under Dirichlet(param): digamma(param_k) - digamma(sum).
void dirichlet_expected_log(std::span<const double> param, std::span<double> out);

// log Gamma(sum a) - sum log Gamma(a_k)
double dirichlet_log_normalizer(std::span<const double> param);

// Sufficient statistics for a Dirichlet fit from (possibly fractionally
// weighted) observations.
struct DirichletStats {
  std::vector<double> mean_log;  // weighted average of E[log p_k]
  double num_obs = 0.0;          // total weight
};

struct DirichletFit {
  std::vector<double> alpha;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;  // per-observation, projected onto the box
  double objective = 0.0;
};

inline constexpr double kPriorFloor = 1e-8;
inline constexpr double kPriorCap = 1e6;

// num_obs * [log G(sum a) - sum log G(a_k) + sum (a_k - 1) mean_log_k]
double dirichlet_objective(const DirichletStats& stats,
                           std::span<const double> alpha);

// Maximum-likelihood Dirichlet (or Beta, for two components) parameters
// by Newton's method. The Hessian is diagonal plus rank one, so each step
// costs O(K). Steps are halved until the objective does not decrease and
// every component stays positive; the result is clamped to
// [kPriorFloor, kPriorCap]. Stops when the projected gradient per
// observation falls below `tol` or after `max_iters` Newton steps.
//
// Throws DomainError on num_obs <= 0 or a non-positive init, and
// EstimationError (with the last iterate) when no ascent step exists
// away from a stationary point.
DirichletFit dirichlet_mle(const DirichletStats& stats,
                           std::span<const double> init, int max_iters = 100,
                           double tol = 1e-10);

}  // namespace mgctm::numerics
