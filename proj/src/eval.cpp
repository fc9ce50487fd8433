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

#include "mgctm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgctm/error.hpp"

namespace mgctm {

ClusterLabels::ClusterLabels(std::vector<int> labels, int num_clusters)
    : labels_(std::move(labels)), num_clusters_(num_clusters) {
  if (num_clusters_ < 0) throw DomainError("negative cluster count");
  for (int l : labels_) {
    if (l < 0 || l >= num_clusters_) {
      throw DomainError("label " + std::to_string(l) + " outside [0, " +
                        std::to_string(num_clusters_) + ")");
    }
  }
}

ClusterLabels ClusterLabels::from_vector(std::vector<int> labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return ClusterLabels(std::move(labels), k);
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

namespace {

using Weights = std::vector<std::vector<std::int64_t>>;

// Classic potentials-based Hungarian algorithm minimizing cost; here the
// cost is the negated weight. 1-based internally.
std::vector<int> hungarian(const Weights& w, const std::vector<char>& row_live,
                           const std::vector<char>& col_live, std::int64_t* value) {
  std::vector<int> rows, cols;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (row_live[i]) rows.push_back(static_cast<int>(i));
    if (col_live[i]) cols.push_back(static_cast<int>(i));
  }
  const std::size_t n = rows.size();
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = static_cast<int>(i);
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = -w[rows[i0 - 1]][cols[j - 1]] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = static_cast<int>(j);
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assign(w.size(), -1);
  std::int64_t total = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    const int r = rows[p[j] - 1];
    assign[r] = cols[j - 1];
    total += w[r][cols[j - 1]];
  }
  if (value != nullptr) *value = total;
  return assign;
}

}  // namespace

std::vector<int> max_weight_assignment(const Weights& weights) {
  const std::size_t n = weights.size();
  for (const auto& row : weights) {
    if (row.size() != n) throw DimensionError("assignment matrix must be square");
  }
  if (n == 0) return {};
  std::vector<char> row_live(n, 1), col_live(n, 1);
  std::int64_t best = 0;
  std::vector<int> assign = hungarian(weights, row_live, col_live, &best);
  if (n > kLexicographicTieBreakLimit) return assign;

  // Fix rows in order, each to the smallest column that still admits an
  // optimal completion.
  std::vector<int> lex(n, -1);
  std::int64_t remaining = best;
  for (std::size_t i = 0; i < n; ++i) {
    row_live[i] = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!col_live[j]) continue;
      col_live[j] = 0;
      std::int64_t rest = 0;
      if (i + 1 < n) hungarian(weights, row_live, col_live, &rest);
      if (weights[i][j] + rest == remaining) {
        lex[i] = static_cast<int>(j);
        remaining = rest;
        break;
      }
      col_live[j] = 1;
    }
  }
  return lex;
}

namespace {

void check_pair(const ClusterLabels& pred, const ClusterLabels& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionError("label vectors differ in length: " + std::to_string(pred.size()) +
                         " vs " + std::to_string(truth.size()));
  }
  if (pred.size() == 0) throw DimensionError("empty label vectors");
}

Weights contingency(const ClusterLabels& pred, const ClusterLabels& truth, std::size_t n) {
  Weights w(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) ++w[pred[i]][truth[i]];
  return w;
}

}  // namespace

std::vector<int> align_labels(const ClusterLabels& pred, const ClusterLabels& truth) {
  check_pair(pred, truth);
  const std::size_t n = static_cast<std::size_t>(
      std::max({pred.num_clusters(), truth.num_clusters(), 1}));
  const auto assign = max_weight_assignment(contingency(pred, truth, n));
  std::vector<int> mapping(static_cast<std::size_t>(pred.num_clusters()), -1);
  for (std::size_t p = 0; p < mapping.size(); ++p) {
    if (assign[p] < truth.num_clusters()) mapping[p] = assign[p];
  }
  return mapping;
}

double clustering_accuracy(const ClusterLabels& pred, const ClusterLabels& truth) {
  const auto mapping = align_labels(pred, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mapping[pred[i]] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double nmi(const ClusterLabels& pred, const ClusterLabels& truth) {
  check_pair(pred, truth);
  const std::size_t P = static_cast<std::size_t>(pred.num_clusters());
  const std::size_t C = static_cast<std::size_t>(truth.num_clusters());
  const double N = static_cast<double>(pred.size());
  std::vector<double> joint(P * C, 0.0), np(P, 0.0), nt(C, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    joint[pred[i] * C + truth[i]] += 1.0;
    np[pred[i]] += 1.0;
    nt[truth[i]] += 1.0;
  }
  auto entropy = [N](const std::vector<double>& counts) {
    double h = 0.0;
    for (double c : counts) {
      if (c > 0.0) h -= (c / N) * std::log(c / N);
    }
    return h;
  };
  const double hp = entropy(np);
  const double ht = entropy(nt);
  if (hp <= 0.0 || ht <= 0.0) {
    // Identical partitions iff every non-empty row and column of the joint
    // table has exactly one non-zero cell.
    for (std::size_t p = 0; p < P; ++p) {
      int nz = 0;
      for (std::size_t c = 0; c < C; ++c) nz += joint[p * C + c] > 0.0;
      if (nz > 1) return 0.0;
    }
    for (std::size_t c = 0; c < C; ++c) {
      int nz = 0;
      for (std::size_t p = 0; p < P; ++p) nz += joint[p * C + c] > 0.0;
      if (nz > 1) return 0.0;
    }
    return 1.0;
  }
  double mi = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t c = 0; c < C; ++c) {
      const double n = joint[p * C + c];
      if (n > 0.0) mi += (n / N) * std::log(n * N / (np[p] * nt[c]));
    }
  }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

}  // namespace mgctm
