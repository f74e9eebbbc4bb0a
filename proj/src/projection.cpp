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

#include "valclust/projection.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "valclust/error.hpp"
#include "valclust/fingerprint.hpp"

namespace valclust {

void to_json(nlohmann::json& j, const ProjectionOptions& o) {
  j = nlohmann::json{{"max_iter", o.max_iter},
                     {"tolerance", o.tolerance},
                     {"seed", o.seed},
                     {"init", o.init == MdsInit::kClassical ? "classical" : "random"}};
}

void from_json(const nlohmann::json& j, ProjectionOptions& o) {
  try {
    o = ProjectionOptions{};
    o.max_iter = j.value("max_iter", o.max_iter);
    o.tolerance = j.value("tolerance", o.tolerance);
    o.seed = j.value("seed", o.seed);
    const auto init = j.value("init", std::string("classical"));
    if (init == "classical") {
      o.init = MdsInit::kClassical;
    } else if (init == "random") {
      o.init = MdsInit::kRandom;
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown MDS init '" + init + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("embedding options: ") + e.what());
  }
  if (o.max_iter < 1) throw Error(ErrorCode::kInvalidConfig, "max_iter must be >= 1");
  if (!(o.tolerance >= 0)) throw Error(ErrorCode::kInvalidConfig, "tolerance must be >= 0");
}

std::string config_fingerprint(const ProjectionOptions& o) { return fingerprint(nlohmann::json(o).dump()); }

void to_json(nlohmann::json& j, const Embedding2D& e) {
  auto coords = nlohmann::json::array();
  for (const auto& p : e.coordinates) coords.push_back({p.x, p.y});
  j = nlohmann::json{{"coordinates", coords},
                     {"stress", e.stress},
                     {"raw_stress", e.raw_stress},
                     {"iterations", e.iterations},
                     {"seed", e.seed},
                     {"stress_history", e.stress_history},
                     {"matrix_fingerprint", e.matrix_fingerprint},
                     {"fingerprint", e.fingerprint}};
}

void from_json(const nlohmann::json& j, Embedding2D& e) {
  e.coordinates.clear();
  for (const auto& p : j.at("coordinates")) e.coordinates.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  e.stress = j.at("stress").get<double>();
  e.raw_stress = j.at("raw_stress").get<double>();
  e.iterations = j.at("iterations").get<std::size_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.stress_history = j.at("stress_history").get<std::vector<double>>();
  e.matrix_fingerprint = j.at("matrix_fingerprint").get<std::string>();
  e.fingerprint = j.at("fingerprint").get<std::string>();
}

namespace {

using Coords = Eigen::Matrix<double, Eigen::Dynamic, 2>;

double stress_of(const Eigen::MatrixXd& d, const Coords& x) {
  double s = 0.0;
  const auto n = d.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = d(i, j) - (x.row(i) - x.row(j)).norm();
      s += r * r;
    }
  }
  return s;
}

Coords classical_init(const Eigen::MatrixXd& d) {
  const auto n = d.rows();
  const Eigen::MatrixXd sq = d.array().square().matrix();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b = -0.5 * centering * sq * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  Coords x(n, 2);
  for (int k = 0; k < 2; ++k) {
    const Eigen::Index col = n - 1 - k;  // eigenvalues ascend
    const double lambda = std::max(0.0, eig.eigenvalues()(col));
    x.col(k) = eig.eigenvectors().col(col) * std::sqrt(lambda);
  }
  return x;
}

// Uniform doubles from the raw 64-bit stream so results do not depend on the
// standard library's distribution implementation.
Coords random_init(Eigen::Index n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  Coords x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < 2; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x(i, k) = (2.0 * u - 1.0) * scale;
    }
  }
  return x;
}

}  // namespace

double raw_stress(const Condensed<double>& d, const std::vector<Point2D>& points) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double r = d(i, j) - std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      s += r * r;
    }
  }
  return s;
}

Embedding2D mds_project(const Condensed<double>& cd, const ProjectionOptions& options) {
  const std::size_t n = cd.n();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "cannot project an empty matrix");
  Embedding2D e;
  e.seed = options.seed;
  if (n == 1) {
    e.coordinates = {{0.0, 0.0}};
    e.stress_history = {0.0};
    return e;
  }
  if (n == 2) {
    e.coordinates = {{0.0, 0.0}, {cd(0, 1), 0.0}};
    e.stress_history = {0.0};
    return e;
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ni, ni);
  double sum_sq = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = cd(i, j);
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      sum_sq += v * v;
      sum += v;
    }
  }
  if (sum_sq == 0.0) {
    e.coordinates.assign(n, Point2D{});
    e.stress_history = {0.0};
    return e;
  }

  Coords x = options.init == MdsInit::kClassical ? classical_init(d) : Coords(Coords::Zero(ni, 2));
  if (x.isZero(0.0)) {
    x = random_init(ni, options.seed, sum / static_cast<double>(Condensed<double>::pair_count(n)));
  }

  double stress = stress_of(d, x);
  e.stress_history.push_back(stress);
  Eigen::MatrixXd bmat(ni, ni);
  for (std::size_t it = 0; it < options.max_iter && stress > 0.0; ++it) {
    // Guttman transform: x <- B(x) x / n
    bmat.setZero();
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = i + 1; j < ni; ++j) {
        const double dist = (x.row(i) - x.row(j)).norm();
        const double v = dist > 0.0 ? -d(i, j) / dist : 0.0;
        bmat(i, j) = v;
        bmat(j, i) = v;
        bmat(i, i) -= v;
        bmat(j, j) -= v;
      }
    }
    Coords next_x = (bmat * x) / static_cast<double>(n);
    const double next = stress_of(d, next_x);
    // a step that does not lower stress is rounding noise at the minimum
    if (!(next < stress)) break;
    x = std::move(next_x);
    e.stress_history.push_back(next);
    e.iterations = it + 1;
    const double improvement = stress - next;
    stress = next;
    if (improvement < options.tolerance * e.stress_history[e.stress_history.size() - 2]) break;
  }

  e.coordinates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    e.coordinates[i] = {x(static_cast<Eigen::Index>(i), 0), x(static_cast<Eigen::Index>(i), 1)};
  }
  e.raw_stress = stress;
  e.stress = stress / sum_sq;
  return e;
}

Embedding2D mds_project(const DistanceMatrix& d, const ProjectionOptions& options) {
  Embedding2D e = mds_project(d.values, options);
  e.matrix_fingerprint = d.fingerprint;
  e.fingerprint = chain_fingerprint(d.fingerprint, config_fingerprint(options));
  return e;
}

void to_json(nlohmann::json& j, const ScatterRecord& r) {
  j = nlohmann::json{{"x", r.x},         {"y", r.y},
                     {"cluster", r.cluster}, {"color", r.color},
                     {"label", r.label}, {"abstracted", r.abstracted},
                     {"count", r.count}};
}

std::vector<ScatterRecord> scatter_payload(const Embedding2D& e, const Clustering& c, const AbstractionMapping& m) {
  if (e.matrix_fingerprint != c.matrix_fingerprint || c.mapping_fingerprint != m.fingerprint ||
      e.coordinates.size() != m.groups.size() || c.labels.size() != m.groups.size()) {
    throw Error(ErrorCode::kFingerprintMismatch, "embedding, clustering and mapping do not belong together");
  }
  std::vector<ScatterRecord> out;
  out.reserve(m.groups.size());
  for (std::size_t i = 0; i < m.groups.size(); ++i) {
    const int label = c.labels[i];
    out.push_back({e.coordinates[i].x, e.coordinates[i].y, label, label == kNoise ? kNoiseColor : label % kPaletteSize,
                   m.groups[i].representative, m.groups[i].abstracted, m.groups[i].total_count()});
  }
  return out;
}

}  // namespace valclust
