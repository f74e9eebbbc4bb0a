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

#include "valclust/profiles.hpp"

#include "valclust/error.hpp"

namespace valclust {
namespace {

const std::u32string kAsciiLetters = U"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
const std::u32string kDigits = U"0123456789";

// Placeholders stand for characters of their group, so they join the class
// holding that group's characters.
std::u32string with_placeholders(std::u32string chars, const AbstractionConfig& a, text::CharGroup g) {
  for (const auto& r : a.rules) {
    if (r.group == g && chars.find(r.placeholder) == std::u32string::npos) chars.push_back(r.placeholder);
  }
  return chars;
}

Profile make(std::string name, std::vector<std::pair<std::string, bool>> answers) {
  Profile p;
  p.name = std::move(name);
  p.answers = std::move(answers);
  p.abstraction = questionnaire_to_config(p.answers, PlaceholderStyle::kFriendly);
  return p;
}

ClusteringConfig complete_linkage(std::optional<double> threshold, std::optional<std::size_t> n_clusters) {
  ClusteringConfig c;
  c.algorithm = ClusterAlgorithm::kHierarchical;
  c.hierarchical = {Linkage::kComplete, threshold, n_clusters};
  return c;
}

Profile artist_name() {
  Profile p = make("artist-name", {{"letter_identity", false},
                                   {"letter_sequence_length", false},
                                   {"letter_separated_sequences", false},
                                   {"digit_identity", false}});
  std::vector<CharClass> classes = {
      {"Letters", with_placeholders(kAsciiLetters, p.abstraction, text::CharGroup::kLetter), {}},
      {"- and '", U"-'", {}},
      {"Digits", with_placeholders(kDigits, p.abstraction, text::CharGroup::kDigit), {}},
      {"Space", U" ", {}},
      {"Comma", U",", {}},
      {"Special", U"", {text::CharGroup::kSpecial}},
  };
  p.distance = {DistanceKind::kBasic, indel_only_matrix(std::move(classes), "Other", {1, 1, 10, 15, 200, 100, 1})};
  p.clustering = complete_linkage(700.0, std::nullopt);
  return p;
}

Profile dating() {
  Profile p = make("dating", {{"letter_case", false}, {"digit_identity", false}, {"digit_sequence_length", false}});
  std::vector<CharClass> classes = {
      {"Digits", with_placeholders(kDigits, p.abstraction, text::CharGroup::kDigit), {}},
  };
  p.distance = {DistanceKind::kLevenshtein, WeightMatrix(std::move(classes), "Other", {1, 4}, {2, 4, 4, 4})};
  p.clustering = complete_linkage(std::nullopt, 25);
  return p;
}

Profile measurement_unit() {
  Profile p = make("measurement-unit", {{"digit_identity", false},
                                        {"digit_sequence_length", false},
                                        {"digit_separated_sequences", false}});
  std::vector<CharClass> classes = {
      {"Digits", with_placeholders(kDigits, p.abstraction, text::CharGroup::kDigit), {}},
      {"Letters", U"", {text::CharGroup::kLetter}},
  };
  // clang-format off
  p.distance = {DistanceKind::kLevenshtein,
                WeightMatrix(std::move(classes), "Special", {2, 1, 2},
                             {0, 3, 4,
                              3, 1, 3,
                              4, 3, 2})};
  // clang-format on
  p.clustering = complete_linkage(3.5, std::nullopt);
  return p;
}

Profile attribution_qualifier() {
  Profile p = make("attribution-qualifier", {{"letter_identity", false}, {"digit_identity", false}});
  std::vector<CharClass> classes = {
      {"Letters", with_placeholders(U"", p.abstraction, text::CharGroup::kLetter), {text::CharGroup::kLetter}},
      {"Space", U" ", {}},
      {"Digit", with_placeholders(kDigits, p.abstraction, text::CharGroup::kDigit), {}},
  };
  p.distance = {DistanceKind::kBasic, indel_only_matrix(std::move(classes), "Special", {1, 20, 30, 100})};
  p.clustering = complete_linkage(100.0, std::nullopt);
  return p;
}

}  // namespace

const std::vector<std::string>& profile_names() {
  static const std::vector<std::string> names = {"artist-name", "dating", "measurement-unit",
                                                 "attribution-qualifier"};
  return names;
}

Profile profile(std::string_view name) {
  if (name == "artist-name") return artist_name();
  if (name == "dating") return dating();
  if (name == "measurement-unit") return measurement_unit();
  if (name == "attribution-qualifier") return attribution_qualifier();
  std::string known;
  for (const auto& n : profile_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::kNotFound, "unknown profile '" + std::string(name) + "' (known: " + known + ")");
}

void to_json(nlohmann::json& j, const Profile& p) {
  nlohmann::json answers = nlohmann::json::object();
  for (const auto& [q, v] : p.answers) answers[q] = v;
  j = nlohmann::json{{"name", p.name},
                     {"answers", answers},
                     {"abstraction", p.abstraction},
                     {"distance", p.distance},
                     {"clustering", p.clustering}};
}

}  // namespace valclust
