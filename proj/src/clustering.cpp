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

#include "valclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>

#include "valclust/error.hpp"
#include "valclust/fingerprint.hpp"

namespace valclust {

std::string_view algorithm_name(ClusterAlgorithm a) {
  switch (a) {
    case ClusterAlgorithm::kHierarchical: return "hierarchical";
    case ClusterAlgorithm::kKMedoids: return "kmedoids";
    case ClusterAlgorithm::kDbscan: return "dbscan";
  }
  return "hierarchical";
}

ClusterAlgorithm algorithm_from_name(std::string_view name) {
  if (name == "hierarchical") return ClusterAlgorithm::kHierarchical;
  if (name == "kmedoids") return ClusterAlgorithm::kKMedoids;
  if (name == "dbscan") return ClusterAlgorithm::kDbscan;
  throw Error(ErrorCode::kInvalidConfig, "unknown clustering algorithm '" + std::string(name) + "'");
}

std::string_view linkage_name(Linkage l) {
  switch (l) {
    case Linkage::kComplete: return "complete";
    case Linkage::kSingle: return "single";
    case Linkage::kAverage: return "average";
  }
  return "complete";
}

Linkage linkage_from_name(std::string_view name) {
  if (name == "complete") return Linkage::kComplete;
  if (name == "single") return Linkage::kSingle;
  if (name == "average") return Linkage::kAverage;
  throw Error(ErrorCode::kInvalidConfig, "unknown linkage '" + std::string(name) + "'");
}

void ClusteringConfig::validate() const {
  const auto& h = hierarchical;
  if (h.distance_threshold.has_value() == h.n_clusters.has_value()) {
    throw Error(ErrorCode::kInvalidConfig,
                "hierarchical clustering needs exactly one of distance_threshold and n_clusters");
  }
  if (h.distance_threshold && (!std::isfinite(*h.distance_threshold) || *h.distance_threshold < 0)) {
    throw Error(ErrorCode::kInvalidConfig, "distance_threshold must be finite and >= 0");
  }
  if (h.n_clusters && *h.n_clusters < 1) throw Error(ErrorCode::kInvalidConfig, "n_clusters must be >= 1");
  if (kmedoids.k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (kmedoids.max_iter < 1) throw Error(ErrorCode::kInvalidConfig, "max_iter must be >= 1");
  if (!std::isfinite(dbscan.eps) || dbscan.eps < 0) throw Error(ErrorCode::kInvalidConfig, "eps must be >= 0");
  if (dbscan.min_samples < 1) throw Error(ErrorCode::kInvalidConfig, "min_samples must be >= 1");
}

void to_json(nlohmann::json& j, const ClusteringConfig& c) {
  nlohmann::json h{{"linkage", linkage_name(c.hierarchical.linkage)}};
  if (c.hierarchical.distance_threshold) h["distance_threshold"] = *c.hierarchical.distance_threshold;
  if (c.hierarchical.n_clusters) h["n_clusters"] = *c.hierarchical.n_clusters;
  j = nlohmann::json{
      {"algorithm", algorithm_name(c.algorithm)},
      {"hierarchical", h},
      {"kmedoids", {{"k", c.kmedoids.k}, {"max_iter", c.kmedoids.max_iter}, {"seed", c.kmedoids.seed}}},
      {"dbscan", {{"eps", c.dbscan.eps}, {"min_samples", c.dbscan.min_samples}}},
  };
}

void from_json(const nlohmann::json& j, ClusteringConfig& c) {
  try {
    c = ClusteringConfig{};
    c.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    if (j.contains("hierarchical")) {
      const auto& h = j.at("hierarchical");
      c.hierarchical.linkage = linkage_from_name(h.value("linkage", std::string("complete")));
      c.hierarchical.distance_threshold.reset();
      if (h.contains("distance_threshold") && !h.at("distance_threshold").is_null()) {
        c.hierarchical.distance_threshold = h.at("distance_threshold").get<double>();
      }
      if (h.contains("n_clusters") && !h.at("n_clusters").is_null()) {
        const auto n = h.at("n_clusters").get<long long>();
        if (n < 1) throw Error(ErrorCode::kInvalidConfig, "n_clusters must be >= 1");
        c.hierarchical.n_clusters = static_cast<std::size_t>(n);
      }
    }
    if (j.contains("kmedoids")) {
      const auto& k = j.at("kmedoids");
      c.kmedoids.k = k.value("k", c.kmedoids.k);
      c.kmedoids.max_iter = k.value("max_iter", c.kmedoids.max_iter);
      c.kmedoids.seed = k.value("seed", c.kmedoids.seed);
    }
    if (j.contains("dbscan")) {
      const auto& d = j.at("dbscan");
      c.dbscan.eps = d.value("eps", c.dbscan.eps);
      c.dbscan.min_samples = d.value("min_samples", c.dbscan.min_samples);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("clustering config: ") + e.what());
  }
  c.validate();
}

std::string config_fingerprint(const ClusteringConfig& c) { return fingerprint(nlohmann::json(c).dump()); }

void to_json(nlohmann::json& j, const Clustering& c) {
  auto clusters = nlohmann::json::array();
  for (const auto& s : c.clusters) clusters.push_back({{"members", s.members}, {"original_count", s.original_count}});
  j = nlohmann::json{{"labels", c.labels},
                     {"k", c.k},
                     {"config_fingerprint", c.config_fingerprint},
                     {"matrix_fingerprint", c.matrix_fingerprint},
                     {"mapping_fingerprint", c.mapping_fingerprint},
                     {"fingerprint", c.fingerprint},
                     {"clusters", clusters},
                     {"noise", c.noise},
                     {"noise_count", c.noise_count},
                     {"cost", c.cost},
                     {"medoids", c.medoids}};
}

void from_json(const nlohmann::json& j, Clustering& c) {
  c.labels = j.at("labels").get<std::vector<int>>();
  c.k = j.at("k").get<std::size_t>();
  c.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  c.matrix_fingerprint = j.at("matrix_fingerprint").get<std::string>();
  c.mapping_fingerprint = j.at("mapping_fingerprint").get<std::string>();
  c.fingerprint = j.at("fingerprint").get<std::string>();
  c.clusters.clear();
  for (const auto& s : j.at("clusters")) {
    c.clusters.push_back({s.at("members").get<std::vector<std::size_t>>(), s.at("original_count").get<std::uint64_t>()});
  }
  c.noise = j.at("noise").get<std::vector<std::size_t>>();
  c.noise_count = j.at("noise_count").get<std::uint64_t>();
  c.cost = j.at("cost").get<double>();
  c.medoids = j.at("medoids").get<std::vector<std::size_t>>();
}

std::size_t canonicalize_labels(std::vector<int>& labels) {
  std::map<int, int> renumber;
  for (auto& l : labels) {
    if (l == kNoise) continue;
    const auto [it, inserted] = renumber.try_emplace(l, static_cast<int>(renumber.size()));
    l = it->second;
  }
  return renumber.size();
}

namespace {

Clustering make_result(const DistanceMatrix& d, const ClusteringConfig& cfg, std::vector<int> labels) {
  Clustering c;
  c.k = canonicalize_labels(labels);
  c.labels = std::move(labels);
  c.config_fingerprint = config_fingerprint(cfg);
  c.matrix_fingerprint = d.fingerprint;
  c.mapping_fingerprint = d.mapping_fingerprint;
  c.fingerprint = chain_fingerprint(d.fingerprint, c.config_fingerprint);
  return c;
}

// Seeded scan order; seed 0 keeps index order.
std::vector<std::size_t> scan_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (seed == 0) return order;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

}  // namespace

Clustering hierarchical_cluster(const DistanceMatrix& d, const ClusteringConfig& cfg) {
  cfg.validate();
  const auto& h = cfg.hierarchical;
  if (d.n() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot cluster an empty matrix");
  if (h.n_clusters && *h.n_clusters > d.n()) {
    throw Error(ErrorCode::kInvalidConfig, "n_clusters (" + std::to_string(*h.n_clusters) +
                                               ") exceeds the number of values (" + std::to_string(d.n()) + ")");
  }
  return make_result(d, cfg, agglomerate<double>(d.values, h.linkage, h.distance_threshold, h.n_clusters));
}

KMedoidsResult pam(const Condensed<double>& d, std::size_t k, std::size_t max_iter, std::uint64_t seed) {
  const std::size_t n = d.n();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidConfig,
                "k (" + std::to_string(k) + ") must be between 1 and the number of values (" + std::to_string(n) + ")");
  }
  const auto order = scan_order(n, seed);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // BUILD: repeatedly add the candidate giving the lowest total cost.
  std::vector<double> nearest(n, kInf);
  std::vector<bool> is_medoid(n, false);
  std::vector<std::size_t> medoids;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_cost = kInf;
    for (std::size_t c : order) {
      if (is_medoid[c]) continue;
      double cost = 0.0;
      for (std::size_t j = 0; j < n; ++j) cost += std::min(nearest[j], d(c, j));
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
    is_medoid[best] = true;
    medoids.push_back(best);
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(best, j));
  }

  auto total_cost = [&](const std::vector<std::size_t>& meds) {
    double cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double m = kInf;
      for (std::size_t med : meds) m = std::min(m, d(med, j));
      cost += m;
    }
    return cost;
  };

  KMedoidsResult result;
  double cost = total_cost(medoids);
  result.build_cost = cost;
  result.cost_history.push_back(cost);

  // SWAP: best single medoid/non-medoid exchange until no improvement.
  std::vector<double> d_near(n);
  std::vector<double> d_second(n);
  std::vector<std::size_t> near_slot(n);
  for (std::size_t iter = 0; iter < max_iter && k < n; ++iter) {
    for (std::size_t j = 0; j < n; ++j) {
      d_near[j] = d_second[j] = kInf;
      for (std::size_t s = 0; s < k; ++s) {
        const double v = d(medoids[s], j);
        if (v < d_near[j]) {
          d_second[j] = d_near[j];
          d_near[j] = v;
          near_slot[j] = s;
        } else if (v < d_second[j]) {
          d_second[j] = v;
        }
      }
    }
    double best_delta = 0.0;
    std::size_t best_slot = k;
    std::size_t best_candidate = n;
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t o : order) {
        if (is_medoid[o]) continue;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double to_o = d(o, j);
          const double keep = near_slot[j] == s ? d_second[j] : d_near[j];
          delta += std::min(to_o, keep) - d_near[j];
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_slot = s;
          best_candidate = o;
        }
      }
    }
    if (best_slot == k) break;
    auto trial = medoids;
    trial[best_slot] = best_candidate;
    const double trial_cost = total_cost(trial);
    if (!(trial_cost < cost)) break;  // rounding in the delta; no real improvement
    is_medoid[medoids[best_slot]] = false;
    is_medoid[best_candidate] = true;
    medoids = std::move(trial);
    cost = trial_cost;
    result.cost_history.push_back(cost);
  }

  std::sort(medoids.begin(), medoids.end());
  result.labels.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    double best = kInf;
    for (std::size_t s = 0; s < k; ++s) {
      const double v = d(medoids[s], j);
      if (v < best) {
        best = v;
        result.labels[j] = static_cast<int>(s);
      }
    }
  }
  result.medoids = std::move(medoids);
  result.cost = cost;
  return result;
}

Clustering kmedoids_cluster(const DistanceMatrix& d, const ClusteringConfig& cfg) {
  cfg.validate();
  const auto& km = cfg.kmedoids;
  auto r = pam(d.values, km.k, km.max_iter, km.seed);
  Clustering c = make_result(d, cfg, r.labels);
  c.cost = r.cost;
  c.medoids = r.medoids;
  return c;
}

std::vector<int> dbscan(const Condensed<double>& d, double eps, std::size_t min_samples) {
  const std::size_t n = d.n();
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) <= eps) neighbors[i].push_back(j);
    }
  }
  std::vector<int> labels(n, kNoise);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kNoise || neighbors[i].size() < min_samples) continue;
    const int id = next++;
    labels[i] = id;
    std::deque<std::size_t> queue{i};
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      for (std::size_t r : neighbors[q]) {
        if (labels[r] != kNoise) continue;
        labels[r] = id;
        if (neighbors[r].size() >= min_samples) queue.push_back(r);
      }
    }
  }
  canonicalize_labels(labels);
  return labels;
}

Clustering dbscan_cluster(const DistanceMatrix& d, const ClusteringConfig& cfg) {
  cfg.validate();
  return make_result(d, cfg, dbscan(d.values, cfg.dbscan.eps, cfg.dbscan.min_samples));
}

Clustering cluster(const DistanceMatrix& d, const ClusteringConfig& cfg) {
  switch (cfg.algorithm) {
    case ClusterAlgorithm::kHierarchical: return hierarchical_cluster(d, cfg);
    case ClusterAlgorithm::kKMedoids: return kmedoids_cluster(d, cfg);
    case ClusterAlgorithm::kDbscan: return dbscan_cluster(d, cfg);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown clustering algorithm");
}

void summarize(Clustering& c, const AbstractionMapping& m) {
  if (c.mapping_fingerprint != m.fingerprint || c.labels.size() != m.groups.size()) {
    throw Error(ErrorCode::kFingerprintMismatch, "clustering was not computed from this abstraction mapping");
  }
  c.clusters.assign(c.k, ClusterSummary{});
  c.noise.clear();
  c.noise_count = 0;
  // Mapping order is already descending by represented count.
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    const auto count = m.groups[i].total_count();
    if (c.labels[i] == kNoise) {
      c.noise.push_back(i);
      c.noise_count += count;
    } else {
      auto& s = c.clusters[static_cast<std::size_t>(c.labels[i])];
      s.members.push_back(i);
      s.original_count += count;
    }
  }
}

std::vector<ExpandedCluster> expand_to_originals(const Clustering& c, const AbstractionMapping& m) {
  if (c.mapping_fingerprint != m.fingerprint || c.labels.size() != m.groups.size()) {
    throw Error(ErrorCode::kFingerprintMismatch, "clustering was not computed from this abstraction mapping");
  }
  std::vector<ExpandedCluster> out(c.k);
  for (std::size_t id = 0; id < c.k; ++id) out[id].id = static_cast<int>(id);
  ExpandedCluster noise;
  noise.id = kNoise;
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    const auto& g = m.groups[i];
    ExpandedCluster& target = c.labels[i] == kNoise ? noise : out[static_cast<std::size_t>(c.labels[i])];
    target.groups.push_back({g.representative, g.abstracted, g.total_count(), g.originals});
    target.original_count += g.total_count();
  }
  for (auto& cl : out) {
    std::stable_sort(cl.groups.begin(), cl.groups.end(),
                     [](const ExpandedGroup& a, const ExpandedGroup& b) { return a.count > b.count; });
  }
  if (!noise.groups.empty()) out.push_back(std::move(noise));
  return out;
}

}  // namespace valclust
