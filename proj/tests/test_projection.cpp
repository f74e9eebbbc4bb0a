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

#include <doctest.h>

#include <cmath>
#include <random>

#include "valclust/error.hpp"
#include "valclust/projection.hpp"

using namespace valclust;

namespace {

double dist(const Point2D& a, const Point2D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Condensed<double> planar(const std::vector<Point2D>& pts) {
  Condensed<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d.set(i, j, dist(pts[i], pts[j]));
  }
  return d;
}

}  // namespace

TEST_CASE("closed forms for one and two points") {
  const auto one = mds_project(Condensed<double>(1), {});
  REQUIRE(one.coordinates.size() == 1);
  CHECK(one.coordinates[0] == Point2D{0, 0});
  CHECK(one.stress == 0.0);

  const auto two = mds_project(Condensed<double>(2, {5.0}), {});
  REQUIRE(two.coordinates.size() == 2);
  CHECK(dist(two.coordinates[0], two.coordinates[1]) == 5.0);
  CHECK(two.coordinates[0].y == 0.0);
  CHECK(two.coordinates[1].y == 0.0);
  CHECK(two.stress == 0.0);

  CHECK_THROWS_AS(mds_project(Condensed<double>(0), {}), Error);
}

TEST_CASE("unit square is recovered") {
  const std::vector<Point2D> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto d = planar(square);
  for (auto init : {MdsInit::kClassical, MdsInit::kRandom}) {
    ProjectionOptions o;
    o.init = init;
    o.seed = 3;
    o.tolerance = 0.0;
    o.max_iter = 2000;
    const auto e = mds_project(d, o);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        CHECK(std::abs(dist(e.coordinates[i], e.coordinates[j]) - d(i, j)) / d(i, j) < 1e-6);
      }
    }
    CHECK(e.stress < 1e-10);
  }
}

TEST_CASE("all-zero matrix gives coincident points") {
  const auto e = mds_project(Condensed<double>(5), {});
  for (const auto& p : e.coordinates) CHECK(dist(p, e.coordinates[0]) == 0.0);
  CHECK(e.stress == 0.0);
}

TEST_CASE("stress never increases and runs are reproducible") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.5, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng() % 15;
    Condensed<double> d(n);
    for (auto& v : d.data()) v = u(rng);
    ProjectionOptions o;
    o.init = trial % 2 ? MdsInit::kRandom : MdsInit::kClassical;
    o.seed = trial;
    const auto e = mds_project(d, o);
    REQUIRE(e.stress_history.size() == e.iterations + 1);
    for (std::size_t i = 1; i < e.stress_history.size(); ++i) {
      CHECK(e.stress_history[i] <= e.stress_history[i - 1] * (1 + 1e-12));
    }
    CHECK(e.stress >= 0.0);
    CHECK(e.raw_stress == doctest::Approx(raw_stress(d, e.coordinates)));
    CHECK(mds_project(d, o) == e);
  }
}

TEST_CASE("options json round trip and validation") {
  ProjectionOptions o;
  o.seed = 42;
  o.init = MdsInit::kRandom;
  CHECK(nlohmann::json(o).get<ProjectionOptions>() == o);
  auto j = nlohmann::json(o);
  j["init"] = "spectral";
  CHECK_THROWS_AS(j.get<ProjectionOptions>(), Error);
  j["init"] = "random";
  j["max_iter"] = 0;
  CHECK_THROWS_AS(j.get<ProjectionOptions>(), Error);
}
