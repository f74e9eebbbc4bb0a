// Copyright 2026 The valclust Authors
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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "valclust/abstraction.hpp"
#include "valclust/condensed.hpp"
#include "valclust/distance.hpp"

namespace valclust {

enum class ClusterAlgorithm { kHierarchical, kKMedoids, kDbscan };
enum class Linkage { kComplete, kSingle, kAverage };

std::string_view algorithm_name(ClusterAlgorithm a);
ClusterAlgorithm algorithm_from_name(std::string_view name);
std::string_view linkage_name(Linkage l);
Linkage linkage_from_name(std::string_view name);

struct HierarchicalConfig {
  Linkage linkage = Linkage::kComplete;
  // Exactly one of the two stop criteria is set.
  std::optional<double> distance_threshold;
  std::optional<std::size_t> n_clusters;
  bool operator==(const HierarchicalConfig&) const = default;
};

struct KMedoidsConfig {
  std::size_t k = 2;
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
  bool operator==(const KMedoidsConfig&) const = default;
};

struct DbscanConfig {
  double eps = 1.0;
  std::size_t min_samples = 2;
  bool operator==(const DbscanConfig&) const = default;
};

struct ClusteringConfig {
  ClusterAlgorithm algorithm = ClusterAlgorithm::kHierarchical;
  HierarchicalConfig hierarchical{Linkage::kComplete, 1.0, std::nullopt};
  KMedoidsConfig kmedoids;
  DbscanConfig dbscan;

  /// Throws Error(kInvalidConfig) when the selected algorithm's parameters
  /// are inconsistent (e.g. both or neither hierarchical stop criteria).
  void validate() const;
  bool operator==(const ClusteringConfig&) const = default;
};

void to_json(nlohmann::json& j, const ClusteringConfig& c);
void from_json(const nlohmann::json& j, ClusteringConfig& c);
std::string config_fingerprint(const ClusteringConfig& c);

inline constexpr int kNoise = -1;

struct ClusterSummary {
  std::vector<std::size_t> members;  // abstracted-value indices, by descending represented count
  std::uint64_t original_count = 0;
  bool operator==(const ClusterSummary&) const = default;
};

struct Clustering {
  std::vector<int> labels;  // per abstracted value, 0..k-1 or kNoise
  std::size_t k = 0;
  std::string config_fingerprint;
  std::string matrix_fingerprint;
  std::string mapping_fingerprint;
  std::string fingerprint;
  std::vector<ClusterSummary> clusters;  // filled by summarize()
  std::vector<std::size_t> noise;        // noise members, same ordering rule
  std::uint64_t noise_count = 0;
  double cost = 0.0;  // k-medoids only: total distance to medoids
  std::vector<std::size_t> medoids;

  bool operator==(const Clustering&) const = default;
};

void to_json(nlohmann::json& j, const Clustering& c);
void from_json(const nlohmann::json& j, Clustering& c);

/// Renumbers labels 0..k-1 in order of first appearance; noise stays kNoise.
std::size_t canonicalize_labels(std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Agglomerative clustering

/// Naive agglomeration with Lance-Williams updates. Each step merges the
/// active pair with minimal linkage, ties broken by the smallest (i, j) where
/// a cluster is identified by its smallest member index. With a threshold,
/// merging continues while the minimal linkage is <= threshold; with a
/// cluster count, until exactly that many clusters remain.
template <typename T>
std::vector<int> agglomerate(const Condensed<T>& d, Linkage linkage, std::optional<T> threshold,
                             std::optional<std::size_t> n_clusters) {
  const std::size_t n = d.n();
  std::vector<T> dist(n * n, T{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist[i * n + j] = dist[j * n + i] = d(i, j);
  }
  std::vector<std::size_t> parent(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::size_t remaining = n;

  const std::size_t target = n_clusters.value_or(1);
  while (remaining > target) {
    std::size_t bi = n;
    std::size_t bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (bi == n || dist[i * n + j] < dist[bi * n + bj]) {
          bi = i;
          bj = j;
        }
      }
    }
    const T best = dist[bi * n + bj];
    if (threshold && best > *threshold) break;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const T a = dist[bi * n + k];
      const T b = dist[bj * n + k];
      T merged = a;
      switch (linkage) {
        case Linkage::kComplete: merged = std::max(a, b); break;
        case Linkage::kSingle: merged = std::min(a, b); break;
        case Linkage::kAverage:
          merged = (T(static_cast<long>(size[bi])) * a + T(static_cast<long>(size[bj])) * b) /
                   T(static_cast<long>(size[bi] + size[bj]));
          break;
      }
      dist[bi * n + k] = dist[k * n + bi] = merged;
    }
    active[bj] = false;
    parent[bj] = bi;
    size[bi] += size[bj];
    --remaining;
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    while (parent[r] != r) r = parent[r];
    labels[i] = static_cast<int>(r);
  }
  canonicalize_labels(labels);
  return labels;
}

Clustering hierarchical_cluster(const DistanceMatrix& d, const ClusteringConfig& cfg);
Clustering kmedoids_cluster(const DistanceMatrix& d, const ClusteringConfig& cfg);
Clustering dbscan_cluster(const DistanceMatrix& d, const ClusteringConfig& cfg);

/// Dispatches on cfg.algorithm.
Clustering cluster(const DistanceMatrix& d, const ClusteringConfig& cfg);

struct KMedoidsResult {
  std::vector<std::size_t> medoids;  // sorted
  std::vector<int> labels;           // index into medoids
  double build_cost = 0.0;
  double cost = 0.0;
  std::vector<double> cost_history;  // after BUILD, then after each swap
};

/// PAM: greedy BUILD then best-improvement SWAP. Points are assigned to the
/// nearest medoid, ties to the lowest medoid index.
KMedoidsResult pam(const Condensed<double>& d, std::size_t k, std::size_t max_iter, std::uint64_t seed);

/// Density-based clustering in index order; border points join the first
/// cluster that reaches them.
std::vector<int> dbscan(const Condensed<double>& d, double eps, std::size_t min_samples);

/// Fills per-cluster summaries from the abstraction mapping. Throws
/// Error(kFingerprintMismatch) if the clustering was not computed from it.
void summarize(Clustering& c, const AbstractionMapping& m);

struct ExpandedGroup {
  std::string representative;
  std::string abstracted;
  std::uint64_t count = 0;
  std::vector<OriginalValue> originals;
};

struct ExpandedCluster {
  int id = 0;  // kNoise for the noise column
  std::uint64_t original_count = 0;
  std::vector<ExpandedGroup> groups;
};

std::vector<ExpandedCluster> expand_to_originals(const Clustering& c, const AbstractionMapping& m);

}  // namespace valclust
