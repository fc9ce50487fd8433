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

#include "mgctm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"

namespace mgctm::numerics {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || std::isinf(x)) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

}  // namespace

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 6.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  // Asymptotic series in 1/x^2 with Bernoulli coefficients.
  const double series =
      r2 * (1.0 / 12 -
            r2 * (1.0 / 120 -
                  r2 * (1.0 / 252 -
                        r2 * (1.0 / 240 -
                              r2 * (1.0 / 132 - r2 * (691.0 / 32760 - r2 / 12.0))))));
  return shift + std::log(x) - 0.5 * r - series;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < 6.0) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  const double series =
      r + 0.5 * r2 +
      r * r2 *
          (1.0 / 6 -
           r2 * (1.0 / 30 -
                 r2 * (1.0 / 42 - r2 * (1.0 / 30 - r2 * (5.0 / 66 - r2 * (691.0 / 2730 - r2 * 7.0 / 6))))));
  return shift + series;
}

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  double shift = 0.0;
  if (x < 7.0) {
    double prod = 1.0;
    while (x < 7.0) {
      prod *= x;
      x += 1.0;
    }
    shift = -std::log(prod);
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  const double series =
      r * (1.0 / 12 -
           r2 * (1.0 / 360 -
                 r2 * (1.0 / 1260 -
                       r2 * (1.0 / 1680 -
                             r2 * (1.0 / 1188 - r2 * (691.0 / 360360 - r2 / 156.0))))));
  return shift + (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double log_sum_exp(std::span<const double> log_weights) {
  if (log_weights.empty()) throw DegeneracyError("log_sum_exp: empty input");
  const double m = kernels::max_value(log_weights);
  if (std::isnan(m)) throw DomainError("log_sum_exp: NaN input");
  if (m == -std::numeric_limits<double>::infinity()) {
    throw DegeneracyError("log_sum_exp: all weights are -inf");
  }
  double acc = 0.0;
  for (double v : log_weights) acc += std::exp(v - m);
  return m + std::log(acc);
}

void log_normalize_inplace(std::span<double> w) {
  if (w.empty()) throw DegeneracyError("log_normalize: empty input");
  double m = -std::numeric_limits<double>::infinity();
  for (double v : w) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw DomainError("log_normalize: NaN or +inf weight");
    }
    m = std::max(m, v);
  }
  if (m == -std::numeric_limits<double>::infinity()) {
    throw DegeneracyError("log_normalize: all weights are -inf");
  }
  for (double& v : w) v = std::exp(v - m);
  kernels::scale(w, 1.0 / kernels::sum(w));
}

std::vector<double> log_normalize(std::span<const double> log_weights) {
  std::vector<double> out(log_weights.begin(), log_weights.end());
  log_normalize_inplace(out);
  return out;
}

void dirichlet_expected_log(std::span<const double> param, std::span<double> out) {
  const double total = digamma(kernels::sum(param));
  for (std::size_t k = 0; k < param.size(); ++k) out[k] = digamma(param[k]) - total;
}

double dirichlet_log_normalizer(std::span<const double> param) {
  double acc = log_gamma(kernels::sum(param));
  for (double a : param) acc -= log_gamma(a);
  return acc;
}

double dirichlet_objective(const DirichletStats& stats, std::span<const double> alpha) {
  double acc = dirichlet_log_normalizer(alpha);
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    acc += (alpha[k] - 1.0) * stats.mean_log[k];
  }
  return stats.num_obs * acc;
}

DirichletFit dirichlet_mle(const DirichletStats& stats, std::span<const double> init,
                           int max_iters, double tol) {
  const std::size_t dim = init.size();
  if (!(stats.num_obs > 0.0)) throw DomainError("dirichlet_mle: num_obs must be positive");
  if (stats.mean_log.size() != dim || dim == 0) {
    throw DimensionError("dirichlet_mle: statistics and init differ in dimension");
  }
  for (double m : stats.mean_log) {
    if (!std::isfinite(m)) throw DomainError("dirichlet_mle: non-finite mean_log");
  }

  DirichletFit fit;
  fit.alpha.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(init[k] > 0.0)) throw DomainError("dirichlet_mle: init must be positive");
    fit.alpha[k] = std::clamp(init[k], kPriorFloor, kPriorCap);
  }

  std::vector<double> grad(dim), hdiag(dim), step(dim), trial(dim);
  double objective = dirichlet_objective(stats, fit.alpha);
  if (!std::isfinite(objective)) {
    throw EstimationError("dirichlet_mle: non-finite objective at init", fit.alpha);
  }

  auto projected_norm = [&](const std::vector<double>& alpha) {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const bool pinned_low = alpha[k] <= kPriorFloor && grad[k] < 0.0;
      const bool pinned_high = alpha[k] >= kPriorCap && grad[k] > 0.0;
      if (!pinned_low && !pinned_high) sq += grad[k] * grad[k];
    }
    return std::sqrt(sq);
  };

  for (;;) {
    // Per-observation gradient and Hessian pieces; num_obs scales both
    // and cancels in the Newton direction.
    const double total = kernels::sum(fit.alpha);
    const double dg_total = digamma(total);
    for (std::size_t k = 0; k < dim; ++k) {
      grad[k] = dg_total - digamma(fit.alpha[k]) + stats.mean_log[k];
      hdiag[k] = -trigamma(fit.alpha[k]);
    }
    fit.gradient_norm = projected_norm(fit.alpha);
    fit.objective = objective;
    if (fit.gradient_norm <= tol) {
      fit.converged = true;
      return fit;
    }
    if (fit.iterations >= max_iters) return fit;

    // H = diag(hdiag) + z 11^T; Sherman-Morrison gives H^{-1} g in O(K).
    const double z = trigamma(total);
    double num = 0.0, den = 1.0 / z;
    for (std::size_t k = 0; k < dim; ++k) {
      num += grad[k] / hdiag[k];
      den += 1.0 / hdiag[k];
    }
    const double c = num / den;
    double max_rel = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      step[k] = (grad[k] - c) / hdiag[k];
      max_rel = std::max(max_rel, std::abs(step[k]) / fit.alpha[k]);
    }

    bool found = false;
    bool changed = false;
    double t = 1.0;
    for (int halving = 0; halving < 64 && !found; ++halving, t *= 0.5) {
      bool positive = true;
      for (std::size_t k = 0; k < dim; ++k) {
        trial[k] = fit.alpha[k] - t * step[k];
        if (!(trial[k] > 0.0)) {
          positive = false;
          break;
        }
        trial[k] = std::clamp(trial[k], kPriorFloor, kPriorCap);
      }
      if (!positive) continue;
      const double value = dirichlet_objective(stats, trial);
      if (std::isfinite(value) && value >= objective) {
        found = true;
        changed = trial != fit.alpha;
        if (changed) {
          fit.alpha = trial;
          objective = value;
        }
      }
    }
    ++fit.iterations;
    if (!changed) {
      // No representable ascent step: at the optimum to working precision
      // (tiny Newton step) or genuinely stuck.
      if (found || max_rel < 1e-8) {
        fit.converged = true;
        fit.objective = objective;
        return fit;
      }
      throw EstimationError("dirichlet_mle: no ascent step found", fit.alpha);
    }
  }
}

}  // namespace mgctm::numerics
