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
#include <limits>

#include "mgctm/baselines.hpp"
#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"
#include "random.hpp"

namespace mgctm {

void KMeansOptions::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
}

namespace {

struct Run {
  std::vector<int> labels;
  DenseMatrix centroids;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  int iterations = 0;
};

DenseMatrix plus_plus_seeds(const DenseMatrix& x, int k, Rng& rng) {
  const std::size_t n = x.rows;
  DenseMatrix c(static_cast<std::size_t>(k), x.cols);
  std::vector<char> taken(n, 0);
  std::size_t first = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n));
  std::copy(x.row(first).begin(), x.row(first).end(), c.row(0).begin());
  taken[first] = 1;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  for (int j = 1; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], kernels::squared_distance(x.row(i), c.row(j - 1)));
    }
    std::size_t pick = 0;
    if (kernels::sum(dist) > 0.0) {
      pick = static_cast<std::size_t>(CategoricalTable(dist).sample(rng));
    } else {
      // every point already coincides with a centroid: take an unused one
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) free.push_back(i);
      }
      pick = free[std::min(free.size() - 1, static_cast<std::size_t>(uniform01(rng) * free.size()))];
    }
    taken[pick] = 1;
    std::copy(x.row(pick).begin(), x.row(pick).end(), c.row(j).begin());
  }
  return c;
}

// Nearest centroid per point (lowest index on ties); returns the cost.
double assign(const DenseMatrix& x, const DenseMatrix& c, std::vector<int>& labels,
              std::vector<double>& dist) {
  double cost = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t j = 0; j < c.rows; ++j) {
      const double d = kernels::squared_distance(x.row(i), c.row(j));
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    labels[i] = arg;
    dist[i] = best;
    cost += best;
  }
  return cost;
}

// Moves the farthest point of a multi-member cluster into each empty
// cluster. Returns true if anything moved.
bool fill_empty(std::vector<int>& labels, std::vector<double>& dist, int k) {
  bool moved = false;
  for (int j = 0; j < k; ++j) {
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    if (sizes[j] > 0) continue;
    std::size_t far = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sizes[labels[i]] > 1 && (far == labels.size() || dist[i] > dist[far])) far = i;
    }
    if (far == labels.size()) break;
    labels[far] = j;
    dist[far] = 0.0;
    moved = true;
  }
  return moved;
}

void update_centroids(const DenseMatrix& x, const std::vector<int>& labels, DenseMatrix& c) {
  std::vector<double> sizes(c.rows, 0.0);
  std::fill(c.data.begin(), c.data.end(), 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    kernels::axpy(1.0, x.row(i), c.row(labels[i]));
    sizes[labels[i]] += 1.0;
  }
  for (std::size_t j = 0; j < c.rows; ++j) {
    if (sizes[j] > 0.0) kernels::scale(c.row(j), 1.0 / sizes[j]);
  }
}

Run lloyd(const DenseMatrix& x, const KMeansOptions& o, Rng& rng) {
  Run run;
  run.centroids = plus_plus_seeds(x, o.k, rng);
  run.labels.assign(x.rows, -1);
  std::vector<int> labels(x.rows);
  std::vector<double> dist(x.rows);
  for (int it = 0; it < o.max_iters; ++it) {
    double cost = assign(x, run.centroids, labels, dist);
    if (fill_empty(labels, dist, o.k)) {
      cost = 0.0;
      for (double d : dist) cost += d;
    }
    run.trace.push_back(cost);
    run.iterations = it + 1;
    const bool stable = labels == run.labels;
    run.labels = labels;
    run.cost = cost;
    if (stable) break;
    update_centroids(x, run.labels, run.centroids);
  }
  update_centroids(x, run.labels, run.centroids);
  return run;
}

}  // namespace

KMeansResult kmeans(const DenseMatrix& vectors, const KMeansOptions& options) {
  options.validate();
  if (vectors.rows == 0) throw DomainError("kmeans: no points");
  if (static_cast<std::size_t>(options.k) > vectors.rows) {
    throw ConfigError("k = " + std::to_string(options.k) + " exceeds the number of points (" +
                      std::to_string(vectors.rows) + ")");
  }
  Rng rng(options.seed);
  Run best;
  for (int r = 0; r < options.restarts; ++r) {
    Run run = lloyd(vectors, options, rng);
    if (run.cost < best.cost) best = std::move(run);
  }
  KMeansResult out;
  out.labels = ClusterLabels(best.labels, options.k);
  out.centroids = std::move(best.centroids);
  out.cost = best.cost;
  out.cost_trace = std::move(best.trace);
  out.iterations = best.iterations;
  return out;
}

}  // namespace mgctm
