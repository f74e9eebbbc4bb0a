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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "valclust/abstraction.hpp"
#include "valclust/clustering.hpp"
#include "valclust/distance.hpp"

namespace valclust {

/// A complete field configuration: abstraction, distance and clustering.
struct Profile {
  std::string name;
  std::vector<std::pair<std::string, bool>> answers;  // questionnaire answers behind `abstraction`
  AbstractionConfig abstraction;
  DistanceConfig distance;
  ClusteringConfig clustering;
};

/// "artist-name", "dating", "measurement-unit", "attribution-qualifier".
const std::vector<std::string>& profile_names();

/// Throws Error(kNotFound) for unknown names.
Profile profile(std::string_view name);

/// {"name", "answers", "abstraction", "distance", "clustering"}
void to_json(nlohmann::json& j, const Profile& p);

}  // namespace valclust
