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
#include <utility>
#include <vector>

#include <json.hpp>

#include "valclust/corpus.hpp"
#include "valclust/text.hpp"

namespace valclust {

/// How much syntactic detail a rule removes.
enum class AbstractionLevel {
  kCharOfGroup = 1,            // each character of the group
  kSequenceOfGroup = 2,        // each maximal run of the group
  kSequenceWithSeparators = 3, // runs joined by at least one separator
};

struct AbstractionRule {
  std::string id;
  AbstractionLevel level = AbstractionLevel::kSequenceOfGroup;
  text::CharGroup group = text::CharGroup::kDigit;
  std::u32string separators;  // level 3 only
  char32_t placeholder = text::kReservedFirst;

  /// Regular-expression rendering of what the rule matches, for display.
  std::string pattern() const;

  bool operator==(const AbstractionRule&) const = default;
};

struct AbstractionConfig {
  bool case_fold = false;
  std::vector<AbstractionRule> rules;  // applied in order
  bool dedupe = true;

  bool operator==(const AbstractionConfig&) const = default;
};

void to_json(nlohmann::json& j, const AbstractionRule& rule);
void from_json(const nlohmann::json& j, AbstractionRule& rule);
void to_json(nlohmann::json& j, const AbstractionConfig& config);
void from_json(const nlohmann::json& j, AbstractionConfig& config);

std::string config_fingerprint(const AbstractionConfig& config);

/// Validated rewriting program. Construct via compile_rules.
class CompiledAbstraction {
 public:
  const AbstractionConfig& config() const noexcept { return config_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Case-folds (when enabled) and applies every rule in order. Placeholders
  /// emitted by earlier rules are never matched by later ones.
  std::string apply(std::string_view value) const;

 private:
  friend CompiledAbstraction compile_rules(const AbstractionConfig& config);
  AbstractionConfig config_;
  std::vector<std::string> warnings_;
};

/// Throws Error(kInvalidConfig) on placeholder collisions, bad rule order or
/// malformed separators.
CompiledAbstraction compile_rules(const AbstractionConfig& config);

struct OriginalValue {
  std::string value;
  std::uint64_t count = 0;
  bool operator==(const OriginalValue&) const = default;
};

struct AbstractionGroup {
  std::string abstracted;
  std::vector<OriginalValue> originals;  // corpus order
  std::string representative;            // highest-count original

  std::uint64_t total_count() const;
  bool operator==(const AbstractionGroup&) const = default;
};

/// Surjection from corpus values to abstracted values. Groups are ordered by
/// descending represented count, ties by abstracted value.
struct AbstractionMapping {
  std::vector<AbstractionGroup> groups;
  std::string config_fingerprint;
  std::string fingerprint;  // chained over corpus and config

  std::size_t size() const noexcept { return groups.size(); }
  std::vector<std::string> abstracted_values() const;
  std::uint64_t total_occurrences() const;
  bool operator==(const AbstractionMapping&) const = default;
};

void to_json(nlohmann::json& j, const AbstractionMapping& mapping);
void from_json(const nlohmann::json& j, AbstractionMapping& mapping);

AbstractionMapping abstract(const ValueCorpus& corpus, const AbstractionConfig& config,
                            unsigned threads = 1);

/// Abstraction restricted to the first `limit` corpus entries.
std::vector<AbstractionGroup> preview(const ValueCorpus& corpus, const AbstractionConfig& config,
                                      std::size_t limit);

// Binary questionnaire. Each answer states whether a syntactic feature is
// important (true) or may be abstracted away (false). The table of questions
// and the rules they toggle is documented in docs/questionnaire.md.

enum class PlaceholderStyle {
  kReserved,  // private-use codepoints U+E000..
  kFriendly,  // '0'/'1' for digits, 'a'/'b' for letters when unambiguous
};

struct Question {
  std::string id;
  std::string text;
};

const std::vector<Question>& questionnaire();

AbstractionConfig questionnaire_to_config(const std::vector<std::pair<std::string, bool>>& answers,
                                          PlaceholderStyle style = PlaceholderStyle::kReserved);

}  // namespace valclust
