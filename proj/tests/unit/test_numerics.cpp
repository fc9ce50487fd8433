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
#include <limits>
#include <random>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "doctest.h"
#include "mgctm/error.hpp"
#include "mgctm/numerics.hpp"
#include "oracles.hpp"

using namespace mgctm;

namespace {

std::vector<double> grid() {
  std::vector<double> xs;
  for (double x = 1e-4; x < 2e3; x *= 1.17) xs.push_back(x);
  for (double x : {0.5, 1.0, 1.5, 2.0, 3.0, 6.0, 10.0, 10.5, 100.0}) xs.push_back(x);
  return xs;
}

double tolerance(double value) { return std::max(1e-10, 1e-14 * std::abs(value)); }

}  // namespace

TEST_CASE("special functions match boost") {
  for (double x : grid()) {
    CAPTURE(x);
    const double dg = boost::math::digamma(x);
    const double tg = boost::math::trigamma(x);
    const double lg = boost::math::lgamma(x);
    CHECK(std::abs(numerics::digamma(x) - dg) <= tolerance(dg));
    CHECK(std::abs(numerics::trigamma(x) - tg) <= std::max(1e-10, 1e-13 * tg));
    CHECK(std::abs(numerics::log_gamma(x) - lg) <= tolerance(lg));
  }
}

TEST_CASE("special functions reject non-positive arguments") {
  CHECK_THROWS_AS(numerics::digamma(0.0), DomainError);
  CHECK_THROWS_AS(numerics::trigamma(-1.0), DomainError);
  CHECK_THROWS_AS(numerics::log_gamma(std::nan("")), DomainError);
}

TEST_CASE("digamma recurrence") {
  for (double x : grid()) {
    CHECK(numerics::digamma(x + 1) - numerics::digamma(x) == doctest::Approx(1.0 / x).epsilon(1e-9));
  }
}

TEST_CASE("xlogx") {
  CHECK(numerics::xlogx(0.0) == 0.0);
  CHECK(numerics::xlogx(1.0) == 0.0);
  CHECK(numerics::xlogx(0.5) == doctest::Approx(0.5 * std::log(0.5)));
}

TEST_CASE("log_sum_exp is stable") {
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(numerics::log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  const std::vector<double> small{-1000.0, -1001.0};
  CHECK(numerics::log_sum_exp(small) == doctest::Approx(-1000.0 + std::log1p(std::exp(-1.0))));
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> mixed{-inf, 2.0};
  CHECK(numerics::log_sum_exp(mixed) == doctest::Approx(2.0));
  const std::vector<double> none{-inf, -inf};
  CHECK_THROWS_AS(numerics::log_sum_exp(none), DegeneracyError);
}

TEST_CASE("log_normalize lands on the simplex") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 300.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(1 + rep % 9);
    for (double& x : v) x = n(rng);
    const auto p = numerics::log_normalize(v);
    double s = 0;
    for (double x : p) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  std::vector<double> bad{1.0, std::nan("")};
  CHECK_THROWS_AS(numerics::log_normalize(bad), DomainError);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> none{-inf, -inf};
  CHECK_THROWS_AS(numerics::log_normalize(none), DegeneracyError);
}

TEST_CASE("dirichlet expectations") {
  const std::vector<double> a{0.3, 2.0, 7.5};
  std::vector<double> out(3);
  numerics::dirichlet_expected_log(a, out);
  for (int k = 0; k < 3; ++k) {
    CHECK(out[k] == doctest::Approx(boost::math::digamma(a[k]) - boost::math::digamma(9.8)).epsilon(1e-12));
  }
  CHECK(numerics::dirichlet_log_normalizer(a) ==
        doctest::Approx(boost::math::lgamma(9.8) - boost::math::lgamma(0.3) - boost::math::lgamma(2.0) -
                        boost::math::lgamma(7.5)));
}

namespace {

numerics::DirichletStats sample_stats(const std::vector<double>& alpha, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::gamma_distribution<double>> g;
  for (double a : alpha) g.emplace_back(a, 1.0);
  numerics::DirichletStats s;
  s.mean_log.assign(alpha.size(), 0.0);
  s.num_obs = n;
  std::vector<double> x(alpha.size());
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    for (std::size_t k = 0; k < x.size(); ++k) sum += (x[k] = g[k](rng));
    for (std::size_t k = 0; k < x.size(); ++k) s.mean_log[k] += std::log(x[k] / sum) / n;
  }
  return s;
}

}  // namespace

TEST_CASE("dirichlet MLE recovers Dirichlet(2, 5)") {
  const auto stats = sample_stats({2.0, 5.0}, 100000, 11);
  const std::vector<double> init{1.0, 1.0};
  const auto fit = numerics::dirichlet_mle(stats, init);
  CHECK(fit.converged);
  CHECK(std::abs(fit.alpha[0] - 2.0) / 2.0 < 0.05);
  CHECK(std::abs(fit.alpha[1] - 5.0) / 5.0 < 0.05);
}

TEST_CASE("beta MLE matches a grid search") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto stats = sample_stats({0.8 + seed, 3.0}, 2000, seed);
    const std::vector<double> init{1.0, 1.0};
    const auto fit = numerics::dirichlet_mle(stats, init);
    const auto [a, b] = oracle::beta_grid_mle(stats.mean_log[0], stats.mean_log[1], 1e-3, 0.05, 10.0);
    CHECK(std::abs(fit.alpha[0] - a) <= 1e-3);
    CHECK(std::abs(fit.alpha[1] - b) <= 1e-3);
  }
}

TEST_CASE("dirichlet MLE is a local maximum of its objective") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto stats = sample_stats({0.5 * seed, 1.0, 3.0}, 500, seed);
    const std::vector<double> init{1.0, 1.0, 1.0};
    const auto fit = numerics::dirichlet_mle(stats, init);
    const double best = numerics::dirichlet_objective(stats, fit.alpha);
    for (int rep = 0; rep < 20; ++rep) {
      auto a = fit.alpha;
      for (double& x : a) x *= 1.0 + u(rng);
      CHECK(numerics::dirichlet_objective(stats, a) <= best + 1e-9);
    }
  }
}

TEST_CASE("dirichlet MLE input validation") {
  numerics::DirichletStats s;
  s.mean_log = {-1.0, -1.0};
  s.num_obs = 0;
  const std::vector<double> init{1.0, 1.0};
  CHECK_THROWS_AS(numerics::dirichlet_mle(s, init), DomainError);
  s.num_obs = 10;
  const std::vector<double> bad{0.0, 1.0};
  CHECK_THROWS_AS(numerics::dirichlet_mle(s, bad), DomainError);
}
