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

#include <cstdint>
#include <span>
#include <vector>

namespace mgctm {

// Per-document cluster ids in [0, num_clusters).
class ClusterLabels {
 public:
  ClusterLabels() = default;
  // Throws DomainError on a negative label or one >= num_clusters.
  ClusterLabels(std::vector<int> labels, int num_clusters);
  // num_clusters = max(label) + 1.
  static ClusterLabels from_vector(std::vector<int> labels);

  const std::vector<int>& labels() const noexcept { return labels_; }
  int num_clusters() const noexcept { return num_clusters_; }
  std::size_t size() const noexcept { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }

 private:
  std::vector<int> labels_;
  int num_clusters_ = 0;
};

// Maximum-weight perfect matching on a square matrix of non-negative
// integer weights (Hungarian method, O(n^3)). Returns column per row.
// Among optimal matchings, the lexicographically smallest row->column
// vector is returned for n <= kLexicographicTieBreakLimit.
inline constexpr std::size_t kLexicographicTieBreakLimit = 40;
std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>>& weights);

// Optimal one-to-one mapping from predicted cluster to true class,
// -1 for predicted clusters matched to padding. Throws DimensionError
// on length mismatch or empty input.
std::vector<int> align_labels(const ClusterLabels& pred, const ClusterLabels& truth);

// Fraction of documents matched under align_labels.
double clustering_accuracy(const ClusterLabels& pred, const ClusterLabels& truth);

// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. When either
// entropy is zero: 1 if the partitions are identical, else 0.
double nmi(const ClusterLabels& pred, const ClusterLabels& truth);

// Ties go to the lowest index.
int argmax(std::span<const double> values);

}  // namespace mgctm
