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

#include "valclust/abstraction.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "valclust/error.hpp"
#include "valclust/fingerprint.hpp"

namespace valclust {
namespace {

std::string group_class(text::CharGroup group) {
  switch (group) {
    case text::CharGroup::kLetter: return "\\p{L}";
    case text::CharGroup::kDigit: return "[0-9]";
    case text::CharGroup::kSpecial: return "[^\\p{L}0-9]";
  }
  return "";
}

std::string regex_escape(char32_t cp) {
  std::string out;
  if (cp < 0x80 && std::string_view("\\^$.|?*+()[]{}-").find(static_cast<char>(cp)) != std::string_view::npos) {
    out.push_back('\\');
  }
  text::append_utf8(out, cp);
  return out;
}

bool contains(std::u32string_view set, char32_t cp) {
  return set.find(cp) != std::u32string_view::npos;
}

std::string codepoint_string(char32_t cp) {
  std::string out;
  text::append_utf8(out, cp);
  return out;
}

char32_t single_codepoint(const std::string& utf8, const char* what) {
  const auto cps = text::decode_utf8(utf8);
  if (cps.size() != 1) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + " must be exactly one character");
  }
  return cps.front();
}

}  // namespace

std::string AbstractionRule::pattern() const {
  const std::string cls = group_class(group);
  switch (level) {
    case AbstractionLevel::kCharOfGroup: return cls;
    case AbstractionLevel::kSequenceOfGroup: return cls + "+";
    case AbstractionLevel::kSequenceWithSeparators: {
      std::string seps = "[";
      for (char32_t s : separators) seps += regex_escape(s);
      seps += "]";
      return cls + "+(?:" + seps + cls + "+)+";
    }
  }
  return cls;
}

void to_json(nlohmann::json& j, const AbstractionRule& rule) {
  j = nlohmann::json{{"id", rule.id},
                     {"level", static_cast<int>(rule.level)},
                     {"group", text::group_name(rule.group)},
                     {"separators", text::encode_utf8(rule.separators)},
                     {"placeholder", codepoint_string(rule.placeholder)}};
}

void from_json(const nlohmann::json& j, AbstractionRule& rule) {
  try {
    rule.id = j.at("id").get<std::string>();
    const int level = j.at("level").get<int>();
    if (level < 1 || level > 3) {
      throw Error(ErrorCode::kInvalidConfig, "rule '" + rule.id + "': level must be 1, 2 or 3");
    }
    rule.level = static_cast<AbstractionLevel>(level);
    rule.group = text::group_from_name(j.at("group").get<std::string>());
    rule.separators = text::decode_utf8(j.value("separators", std::string()));
    rule.placeholder = single_codepoint(j.at("placeholder").get<std::string>(), "placeholder");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("abstraction rule: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const AbstractionConfig& config) {
  j = nlohmann::json{{"case_fold", config.case_fold}, {"dedupe", config.dedupe}, {"rules", config.rules}};
}

void from_json(const nlohmann::json& j, AbstractionConfig& config) {
  try {
    config.case_fold = j.value("case_fold", false);
    config.dedupe = j.value("dedupe", true);
    config.rules = j.value("rules", std::vector<AbstractionRule>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("abstraction config: ") + e.what());
  }
}

std::string config_fingerprint(const AbstractionConfig& config) {
  return fingerprint(nlohmann::json(config).dump());
}

CompiledAbstraction compile_rules(const AbstractionConfig& config) {
  const auto& rules = config.rules;
  std::map<char32_t, std::vector<std::string>> by_placeholder;
  for (const auto& r : rules) by_placeholder[r.placeholder].push_back(r.id);
  std::string collisions;
  for (const auto& [cp, ids] : by_placeholder) {
    if (ids.size() < 2) continue;
    for (const auto& id : ids) collisions += (collisions.empty() ? "" : ", ") + id;
  }
  if (!collisions.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "placeholder collision between rules: " + collisions);
  }

  auto consumes_group = [&](text::CharGroup g) {
    return std::any_of(rules.begin(), rules.end(), [&](const AbstractionRule& r) {
      return r.group == g && r.level != AbstractionLevel::kSequenceWithSeparators;
    });
  };

  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (text::is_control(r.placeholder)) {
      throw Error(ErrorCode::kInvalidConfig, "rule '" + r.id + "': placeholder is a control character");
    }
    // A non-reserved placeholder is only unambiguous if every corpus
    // occurrence of that character is itself rewritten by some rule.
    if (!text::is_reserved(r.placeholder)) {
      bool covered = false;
      for (auto g : {text::CharGroup::kLetter, text::CharGroup::kDigit, text::CharGroup::kSpecial}) {
        if (text::in_group(r.placeholder, g) && consumes_group(g)) covered = true;
      }
      if (!covered) {
        throw Error(ErrorCode::kInvalidConfig,
                    "placeholder collision: rule '" + r.id + "' placeholder '" + codepoint_string(r.placeholder) +
                        "' can occur unabstracted in the corpus");
      }
    }
    if (r.level == AbstractionLevel::kSequenceWithSeparators) {
      if (r.separators.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "rule '" + r.id + "': level-3 rule needs separators");
      }
      for (char32_t s : r.separators) {
        if (text::in_group(s, r.group)) {
          throw Error(ErrorCode::kInvalidConfig, "rule '" + r.id + "': separator belongs to the rule's own group");
        }
      }
    }
    for (std::size_t k = i + 1; k < rules.size(); ++k) {
      if (rules[k].group == r.group && static_cast<int>(rules[k].level) > static_cast<int>(r.level)) {
        throw Error(ErrorCode::kInvalidConfig, "rule '" + rules[k].id + "' must precede rule '" + r.id +
                                                   "' (longer matches first within a group)");
      }
    }
  }

  CompiledAbstraction program;
  program.config_ = config;
  if (rules.empty() && !config.case_fold) {
    program.warnings_.push_back(config.dedupe ? "no abstraction rules: values are only deduplicated"
                                              : "no abstraction rules and dedupe disabled: identity mapping");
  }
  return program;
}

std::string CompiledAbstraction::apply(std::string_view value) const {
  std::u32string cps = text::decode_utf8(value);
  if (config_.case_fold) {
    for (auto& cp : cps) cp = text::to_lower(cp);
  }
  std::vector<bool> fixed(cps.size(), false);

  for (const auto& rule : config_.rules) {
    std::u32string out;
    std::vector<bool> out_fixed;
    out.reserve(cps.size());
    out_fixed.reserve(cps.size());
    auto member = [&](std::size_t i) { return !fixed[i] && text::in_group(cps[i], rule.group); };
    auto separator = [&](std::size_t i) { return !fixed[i] && contains(rule.separators, cps[i]); };

    std::size_t i = 0;
    while (i < cps.size()) {
      std::size_t end = i;
      if (member(i)) {
        switch (rule.level) {
          case AbstractionLevel::kCharOfGroup:
            end = i + 1;
            break;
          case AbstractionLevel::kSequenceOfGroup:
            end = i;
            while (end < cps.size() && member(end)) ++end;
            break;
          case AbstractionLevel::kSequenceWithSeparators: {
            std::size_t run = i;
            while (run < cps.size() && member(run)) ++run;
            std::size_t best = i;  // no match unless a separator is crossed
            while (run < cps.size() && separator(run) && run + 1 < cps.size() && member(run + 1)) {
              run += 1;
              while (run < cps.size() && member(run)) ++run;
              best = run;
            }
            end = best;
            break;
          }
        }
      }
      if (end > i) {
        out.push_back(rule.placeholder);
        out_fixed.push_back(true);
        i = end;
      } else {
        out.push_back(cps[i]);
        out_fixed.push_back(fixed[i]);
        ++i;
      }
    }
    cps = std::move(out);
    fixed = std::move(out_fixed);
  }
  return text::encode_utf8(cps);
}

std::uint64_t AbstractionGroup::total_count() const {
  std::uint64_t total = 0;
  for (const auto& o : originals) total += o.count;
  return total;
}

std::vector<std::string> AbstractionMapping::abstracted_values() const {
  std::vector<std::string> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.abstracted);
  return out;
}

std::uint64_t AbstractionMapping::total_occurrences() const {
  std::uint64_t total = 0;
  for (const auto& g : groups) total += g.total_count();
  return total;
}

void to_json(nlohmann::json& j, const AbstractionMapping& mapping) {
  auto groups = nlohmann::json::array();
  for (const auto& g : mapping.groups) {
    auto originals = nlohmann::json::array();
    for (const auto& o : g.originals) originals.push_back({o.value, o.count});
    groups.push_back({{"abstracted", g.abstracted}, {"representative", g.representative}, {"originals", originals}});
  }
  j = nlohmann::json{
      {"config_fingerprint", mapping.config_fingerprint}, {"fingerprint", mapping.fingerprint}, {"groups", groups}};
}

void from_json(const nlohmann::json& j, AbstractionMapping& mapping) {
  mapping.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  mapping.fingerprint = j.at("fingerprint").get<std::string>();
  mapping.groups.clear();
  for (const auto& g : j.at("groups")) {
    AbstractionGroup group;
    group.abstracted = g.at("abstracted").get<std::string>();
    group.representative = g.at("representative").get<std::string>();
    for (const auto& o : g.at("originals")) {
      group.originals.push_back({o.at(0).get<std::string>(), o.at(1).get<std::uint64_t>()});
    }
    mapping.groups.push_back(std::move(group));
  }
}

AbstractionMapping abstract(const ValueCorpus& corpus, const AbstractionConfig& config, unsigned threads) {
  const CompiledAbstraction program = compile_rules(config);
  const auto& entries = corpus.entries();
  std::vector<std::string> rewritten(entries.size());

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(entries.size())));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) rewritten[i] = program.apply(entries[i].value);
  };
  if (threads <= 1) {
    work(0, entries.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (entries.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(entries.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  std::vector<AbstractionGroup> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::size_t slot;
    if (config.dedupe) {
      const auto [it, inserted] = index.try_emplace(rewritten[i], groups.size());
      if (inserted) groups.push_back({rewritten[i], {}, entries[i].value});
      slot = it->second;
    } else {
      slot = groups.size();
      groups.push_back({rewritten[i], {}, entries[i].value});
    }
    // Corpus order is count-descending, so the first original is the representative.
    groups[slot].originals.push_back({entries[i].value, entries[i].count});
  }
  std::stable_sort(groups.begin(), groups.end(), [](const AbstractionGroup& a, const AbstractionGroup& b) {
    const auto ca = a.total_count();
    const auto cb = b.total_count();
    if (ca != cb) return ca > cb;
    return a.abstracted < b.abstracted;
  });

  AbstractionMapping mapping;
  mapping.groups = std::move(groups);
  mapping.config_fingerprint = config_fingerprint(config);
  mapping.fingerprint = chain_fingerprint(corpus.fingerprint(), mapping.config_fingerprint);
  return mapping;
}

std::vector<AbstractionGroup> preview(const ValueCorpus& corpus, const AbstractionConfig& config,
                                      std::size_t limit) {
  if (limit == 0) throw Error(ErrorCode::kInvalidArgument, "preview limit must be at least 1");
  const auto& entries = corpus.entries();
  std::vector<CorpusEntry> prefix(entries.begin(),
                                  entries.begin() + static_cast<std::ptrdiff_t>(std::min(limit, entries.size())));
  return abstract(ValueCorpus(std::move(prefix), corpus.source_label()), config).groups;
}

// ---------------------------------------------------------------------------
// Questionnaire

namespace {

struct GroupQuestions {
  text::CharGroup group;
  const char* name;
  const char* identity;
  const char* length;
  const char* separated;  // nullptr when the group has no level-3 question
  std::u32string separators;
};

const std::vector<GroupQuestions>& group_questions() {
  static const std::vector<GroupQuestions> table = {
      {text::CharGroup::kLetter, "letter", "letter_identity", "letter_sequence_length",
       "letter_separated_sequences", U" "},
      {text::CharGroup::kDigit, "digit", "digit_identity", "digit_sequence_length", "digit_separated_sequences",
       U",."},
      {text::CharGroup::kSpecial, "special", "special_identity", "special_sequence_length", nullptr, U""},
  };
  return table;
}

char32_t reserved_placeholder(text::CharGroup group, AbstractionLevel level) {
  return text::kReservedFirst + static_cast<char32_t>(static_cast<int>(group) * 3 + static_cast<int>(level) - 1);
}

char32_t friendly_placeholder(text::CharGroup group, AbstractionLevel level) {
  const bool l3 = level == AbstractionLevel::kSequenceWithSeparators;
  switch (group) {
    case text::CharGroup::kDigit: return l3 ? U'1' : U'0';
    case text::CharGroup::kLetter: return l3 ? U'b' : U'a';
    case text::CharGroup::kSpecial: break;
  }
  return reserved_placeholder(group, level);
}

}  // namespace

const std::vector<Question>& questionnaire() {
  static const std::vector<Question> questions = {
      {"letter_case", "Does the case of letters (upper/lower) matter?"},
      {"letter_identity", "Does it matter which concrete letter is used?"},
      {"letter_sequence_length", "Does the length of a sequence of letters matter?"},
      {"letter_separated_sequences", "Does it matter how many words separated by spaces a text consists of?"},
      {"digit_identity", "Does it matter which concrete digit is used?"},
      {"digit_sequence_length", "Does the length of a sequence of digits matter?"},
      {"digit_separated_sequences", "Does it matter whether a number contains a decimal separator?"},
      {"special_identity", "Does it matter which concrete special character is used?"},
      {"special_sequence_length", "Does the length of a sequence of special characters matter?"},
  };
  return questions;
}

AbstractionConfig questionnaire_to_config(const std::vector<std::pair<std::string, bool>>& answers,
                                          PlaceholderStyle style) {
  std::map<std::string, bool> important;
  for (const auto& q : questionnaire()) important[q.id] = true;
  for (const auto& [id, value] : answers) {
    const auto it = important.find(id);
    if (it == important.end()) throw Error(ErrorCode::kInvalidConfig, "unknown question id '" + id + "'");
    it->second = value;
  }

  AbstractionConfig config;
  config.case_fold = !important["letter_case"];
  config.dedupe = true;

  // Level 3 of every group first, then level 2, then level 1.
  std::vector<AbstractionRule> rules;
  for (const auto level : {AbstractionLevel::kSequenceWithSeparators, AbstractionLevel::kSequenceOfGroup,
                           AbstractionLevel::kCharOfGroup}) {
    for (const auto& gq : group_questions()) {
      const bool keep_identity = important[gq.identity];
      const bool keep_length = important[gq.length];
      const bool keep_separated = gq.separated == nullptr || important[gq.separated];
      bool enabled = false;
      const char* suffix = "";
      switch (level) {
        case AbstractionLevel::kSequenceWithSeparators:
          enabled = !keep_separated;
          suffix = "_separated_sequence";
          break;
        case AbstractionLevel::kSequenceOfGroup:
          enabled = !keep_length;
          suffix = "_sequence";
          break;
        case AbstractionLevel::kCharOfGroup:
          enabled = !keep_identity && keep_length;
          suffix = "_char";
          break;
      }
      if (!enabled) continue;
      AbstractionRule rule;
      rule.id = std::string(gq.name) + suffix;
      rule.level = level;
      rule.group = gq.group;
      if (level == AbstractionLevel::kSequenceWithSeparators) rule.separators = gq.separators;
      rule.placeholder = reserved_placeholder(gq.group, level);
      rules.push_back(std::move(rule));
    }
  }
  config.rules = std::move(rules);

  if (style == PlaceholderStyle::kFriendly) {
    for (auto& rule : config.rules) {
      AbstractionConfig trial = config;
      for (auto& r : trial.rules) {
        if (r.id == rule.id) r.placeholder = friendly_placeholder(rule.group, rule.level);
      }
      try {
        compile_rules(trial);
        rule.placeholder = friendly_placeholder(rule.group, rule.level);
      } catch (const Error&) {
        // keep the reserved placeholder
      }
    }
  }
  return config;
}

}  // namespace valclust
