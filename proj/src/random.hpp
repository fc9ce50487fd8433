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

// Seeded sampling helpers shared by the sampler, initializers and
// baselines. Everything draws from one std::mt19937_64 so runs are
// reproducible given the seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mgctm {

using Rng = std::mt19937_64;

// Derives an independent stream seed from (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

// log of a Gamma(shape, 1) draw. Shapes below 1 use the identity
// G(a) = G(a + 1) * U^(1/a), kept in log space so tiny shapes do not
// underflow to zero.
inline double log_gamma_draw(Rng& rng, double shape) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(rng));
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return std::log(g(rng)) + std::log(u) / shape;
}

inline void sample_dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out) {
  if (out.empty()) return;
  double m = -INFINITY;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = log_gamma_draw(rng, alpha[k]);
    m = std::max(m, out[k]);
  }
  double s = 0.0;
  for (double& v : out) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : out) v /= s;
}

inline void sample_dirichlet_symmetric(Rng& rng, double alpha, std::span<double> out) {
  std::vector<double> a(out.size(), alpha);
  sample_dirichlet(rng, a, out);
}

// Inverse-CDF sampling from fixed (unnormalized) weights.
class CategoricalTable {
 public:
  explicit CategoricalTable(std::span<const double> weights) : cumulative_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cumulative_[i] = acc;
    }
  }

  int sample(Rng& rng) const {
    const double target = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace mgctm
