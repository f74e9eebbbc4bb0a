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

#include "valclust/distance.hpp"

#include <cmath>
#include <new>
#include <thread>

#include "valclust/error.hpp"
#include "valclust/fingerprint.hpp"

namespace valclust {

bool CharClass::contains(char32_t cp) const {
  if (chars.find(cp) != std::u32string::npos) return true;
  return std::any_of(categories.begin(), categories.end(),
                     [cp](text::CharGroup g) { return text::in_group(cp, g); });
}

WeightMatrix::WeightMatrix(std::vector<CharClass> classes, std::string other_name, std::vector<double> indel,
                           std::vector<double> sub)
    : classes_(std::move(classes)),
      other_name_(std::move(other_name)),
      indel_(std::move(indel)),
      sub_(std::move(sub)) {
  const std::size_t k = class_count();
  if (k > 0xFFFF) throw Error(ErrorCode::kInvalidConfig, "too many character classes");
  if (indel_.size() != k) {
    throw Error(ErrorCode::kInvalidConfig, "expected " + std::to_string(k) + " indel weights (one per class plus '" +
                                               other_name_ + "'), got " + std::to_string(indel_.size()));
  }
  if (sub_.size() != k * k) {
    throw Error(ErrorCode::kInvalidConfig,
                "expected a " + std::to_string(k) + "x" + std::to_string(k) + " substitution matrix");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (!std::isfinite(indel_[c]) || indel_[c] < 0) {
      throw Error(ErrorCode::kInvalidConfig, "indel weight of '" + class_name(c) + "' must be finite and >= 0");
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const double v = sub_[a * k + b];
      if (!std::isfinite(v) || v < 0) {
        throw Error(ErrorCode::kInvalidConfig, "substitution weight (" + class_name(a) + ", " + class_name(b) +
                                                   ") must be finite and >= 0");
      }
      if (v != sub_[b * k + a]) {
        throw Error(ErrorCode::kInvalidConfig, "substitution matrix must be symmetric: (" + class_name(a) + ", " +
                                                   class_name(b) + ") differs from its mirror");
      }
    }
  }
}

std::string WeightMatrix::class_name(std::size_t c) const {
  return c < classes_.size() ? classes_[c].name : other_name_;
}

std::size_t WeightMatrix::classify(char32_t cp) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].contains(cp)) return i;
  }
  return classes_.size();
}

std::size_t classify_char(char32_t cp, const WeightMatrix& w) { return w.classify(cp); }

WeightMatrix derive_sub_as_indel_sum(const WeightMatrix& w) {
  return indel_only_matrix(w.classes(), w.other_name(), w.indel());
}

WeightMatrix indel_only_matrix(std::vector<CharClass> classes, std::string other_name, std::vector<double> indel) {
  const std::size_t k = classes.size() + 1;
  std::vector<double> sub(k * k, 0.0);
  if (indel.size() == k) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) sub[a * k + b] = indel[a] + indel[b];
    }
  }
  return WeightMatrix(std::move(classes), std::move(other_name), std::move(indel), std::move(sub));
}

std::string_view distance_kind_name(DistanceKind kind) {
  return kind == DistanceKind::kBasic ? "basic" : "levenshtein";
}

DistanceKind distance_kind_from_name(std::string_view name) {
  if (name == "basic") return DistanceKind::kBasic;
  if (name == "levenshtein") return DistanceKind::kLevenshtein;
  throw Error(ErrorCode::kInvalidConfig, "unknown distance kind '" + std::string(name) + "'");
}

WeightMatrix DistanceConfig::effective_weights() const {
  return kind == DistanceKind::kBasic ? derive_sub_as_indel_sum(weights) : weights;
}

void to_json(nlohmann::json& j, const WeightMatrix& w) {
  auto classes = nlohmann::json::array();
  for (const auto& c : w.classes()) {
    nlohmann::json cj{{"name", c.name}, {"chars", text::encode_utf8(c.chars)}};
    if (!c.categories.empty()) {
      auto cats = nlohmann::json::array();
      for (auto g : c.categories) cats.push_back(text::group_name(g));
      cj["categories"] = cats;
    }
    classes.push_back(std::move(cj));
  }
  const std::size_t k = w.class_count();
  auto sub = nlohmann::json::array();
  for (std::size_t a = 0; a < k; ++a) {
    auto row = nlohmann::json::array();
    for (std::size_t b = 0; b < k; ++b) row.push_back(w.sub(a, b));
    sub.push_back(std::move(row));
  }
  j = nlohmann::json{{"classes", classes}, {"other", w.other_name()}, {"indel", w.indel()}, {"sub", sub}};
}

void from_json(const nlohmann::json& j, WeightMatrix& w) {
  try {
    std::vector<CharClass> classes;
    for (const auto& cj : j.at("classes")) {
      CharClass c;
      c.name = cj.at("name").get<std::string>();
      c.chars = text::decode_utf8(cj.value("chars", std::string()));
      for (const auto& g : cj.value("categories", std::vector<std::string>{})) {
        c.categories.push_back(text::group_from_name(g));
      }
      classes.push_back(std::move(c));
    }
    std::string other = j.value("other", std::string("Other"));
    auto indel = j.at("indel").get<std::vector<double>>();
    if (!j.contains("sub")) {
      w = indel_only_matrix(std::move(classes), std::move(other), std::move(indel));
      return;
    }
    const auto rows = j.at("sub").get<std::vector<std::vector<double>>>();
    std::vector<double> sub;
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw Error(ErrorCode::kInvalidConfig, "substitution matrix must be square");
      sub.insert(sub.end(), row.begin(), row.end());
    }
    w = WeightMatrix(std::move(classes), std::move(other), std::move(indel), std::move(sub));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("weight matrix: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const DistanceConfig& config) {
  j = nlohmann::json(config.weights);
  j["kind"] = distance_kind_name(config.kind);
}

void from_json(const nlohmann::json& j, DistanceConfig& config) {
  if (!j.is_object() || !j.contains("kind")) throw Error(ErrorCode::kInvalidConfig, "distance config needs 'kind'");
  config.kind = distance_kind_from_name(j.at("kind").get<std::string>());
  config.weights = j.get<WeightMatrix>();
}

std::string config_fingerprint(const DistanceConfig& config) {
  return fingerprint(nlohmann::json(config).dump());
}

ClassifiedString classify_string(std::string_view utf8, const WeightMatrix& w) {
  ClassifiedString s;
  s.chars = text::decode_utf8(utf8);
  s.classes.reserve(s.chars.size());
  for (char32_t cp : s.chars) s.classes.push_back(static_cast<std::uint16_t>(w.classify(cp)));
  return s;
}

WeightTable<double> weight_table(const WeightMatrix& w) {
  return WeightTable<double>{w.class_count(), w.indel(), w.sub()};
}

double weighted_levenshtein(std::string_view a, std::string_view b, const WeightMatrix& w) {
  std::vector<double> row;
  return weighted_edit_distance(classify_string(a, w), classify_string(b, w), weight_table(w), row);
}

double basic_edit_distance(std::string_view a, std::string_view b, const WeightMatrix& w) {
  return weighted_levenshtein(a, b, derive_sub_as_indel_sum(w));
}

void to_json(nlohmann::json& j, const DistanceMatrix& d) {
  j = nlohmann::json{{"n", d.n()},
                     {"condensed", d.values.data()},
                     {"value_index", d.value_index},
                     {"mapping_fingerprint", d.mapping_fingerprint},
                     {"fingerprint", d.fingerprint}};
}

void from_json(const nlohmann::json& j, DistanceMatrix& d) {
  const auto n = j.at("n").get<std::size_t>();
  auto data = j.at("condensed").get<std::vector<double>>();
  if (data.size() != Condensed<double>::pair_count(n)) {
    throw Error(ErrorCode::kParseError, "condensed matrix length does not match n(n-1)/2 for n=" + std::to_string(n));
  }
  d.values = Condensed<double>(n, std::move(data));
  d.value_index = j.at("value_index").get<std::vector<std::string>>();
  d.mapping_fingerprint = j.at("mapping_fingerprint").get<std::string>();
  d.fingerprint = j.at("fingerprint").get<std::string>();
}

Condensed<double> pairwise_distances(std::span<const std::string> values, const WeightMatrix& effective,
                                     unsigned threads, MatrixProgress* progress) {
  const std::size_t n = values.size();
  const std::size_t pairs = Condensed<double>::pair_count(n);
  Condensed<double> out;
  try {
    if (n > 0 && pairs / n > n) throw std::bad_alloc();
    out = Condensed<double>(n);
  } catch (const std::bad_alloc&) {
    throw Error(ErrorCode::kResourceExhausted,
                "cannot allocate distance matrix for " + std::to_string(pairs) + " pairs");
  }
  if (progress != nullptr) {
    progress->done = 0;
    progress->total = pairs;
  }
  std::vector<ClassifiedString> classified;
  classified.reserve(n);
  for (const auto& v : values) classified.push_back(classify_string(v, effective));
  const WeightTable<double> table = weight_table(effective);

  std::atomic<std::size_t> next_row{0};
  auto worker = [&] {
    std::vector<double> scratch;
    for (;;) {
      const std::size_t i = next_row.fetch_add(1, std::memory_order_relaxed);
      if (i + 1 >= n) break;
      double* dst = out.data().data() + Condensed<double>::index(n, i, i + 1);
      for (std::size_t j = i + 1; j < n; ++j) {
        *dst++ = weighted_edit_distance(classified[i], classified[j], table, scratch);
      }
      if (progress != nullptr) progress->done.fetch_add(n - i - 1, std::memory_order_relaxed);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || n < 3) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

DistanceMatrix distance_matrix(const AbstractionMapping& mapping, const DistanceConfig& config, unsigned threads,
                               MatrixProgress* progress) {
  if (mapping.groups.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "abstraction mapping is empty", std::string("abstraction"));
  }
  DistanceMatrix d;
  d.value_index = mapping.abstracted_values();
  d.values = pairwise_distances(d.value_index, config.effective_weights(), threads, progress);
  d.mapping_fingerprint = mapping.fingerprint;
  d.fingerprint = chain_fingerprint(mapping.fingerprint, config_fingerprint(config));
  return d;
}

}  // namespace valclust
