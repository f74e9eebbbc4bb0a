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
#include <string>
#include <vector>

#include <json.hpp>

#include "valclust/abstraction.hpp"
#include "valclust/clustering.hpp"
#include "valclust/condensed.hpp"
#include "valclust/distance.hpp"

namespace valclust {

enum class MdsInit { kClassical, kRandom };

struct ProjectionOptions {
  std::size_t max_iter = 300;
  double tolerance = 1e-6;  // relative stress improvement
  std::uint64_t seed = 0;
  MdsInit init = MdsInit::kClassical;
  bool operator==(const ProjectionOptions&) const = default;
};

void to_json(nlohmann::json& j, const ProjectionOptions& o);
void from_json(const nlohmann::json& j, ProjectionOptions& o);
std::string config_fingerprint(const ProjectionOptions& o);

struct Point2D {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2D&) const = default;
};

struct Embedding2D {
  std::vector<Point2D> coordinates;
  double stress = 0.0;      // raw stress / sum of squared dissimilarities
  double raw_stress = 0.0;  // sum over pairs of (d_ij - |x_i - x_j|)^2
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> stress_history;  // raw stress of the start and after every iteration
  std::string matrix_fingerprint;
  std::string fingerprint;

  bool operator==(const Embedding2D&) const = default;
};

void to_json(nlohmann::json& j, const Embedding2D& e);
void from_json(const nlohmann::json& j, Embedding2D& e);

/// Metric SMACOF in two dimensions, optionally started from classical
/// (Torgerson) scaling. n <= 2 is solved in closed form.
Embedding2D mds_project(const Condensed<double>& d, const ProjectionOptions& options);
Embedding2D mds_project(const DistanceMatrix& d, const ProjectionOptions& options);

double raw_stress(const Condensed<double>& d, const std::vector<Point2D>& points);

inline constexpr int kPaletteSize = 20;
inline constexpr int kNoiseColor = kPaletteSize;

struct ScatterRecord {
  double x = 0.0;
  double y = 0.0;
  int cluster = 0;  // kNoise for noise
  int color = 0;
  std::string label;  // representative original value
  std::string abstracted;
  std::uint64_t count = 0;
};

void to_json(nlohmann::json& j, const ScatterRecord& r);

std::vector<ScatterRecord> scatter_payload(const Embedding2D& e, const Clustering& c, const AbstractionMapping& m);

}  // namespace valclust
