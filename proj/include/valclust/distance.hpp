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

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "valclust/abstraction.hpp"
#include "valclust/condensed.hpp"
#include "valclust/text.hpp"

namespace valclust {

/// A named set of characters: explicit codepoints plus optional whole
/// character groups (e.g. every Unicode letter).
struct CharClass {
  std::string name;
  std::u32string chars;
  std::vector<text::CharGroup> categories;

  bool contains(char32_t cp) const;
  bool operator==(const CharClass&) const = default;
};

/// Character classes with insertion/deletion and substitution weights.
/// Class index classes().size() is the catch-all class for characters no
/// explicit class claims. indel has one entry per class including the
/// catch-all; sub is a symmetric (classes+1)^2 row-major table whose
/// diagonal holds the cost of substituting two different characters of the
/// same class.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  /// Validates sizes, symmetry and non-negativity; throws Error(kInvalidConfig).
  WeightMatrix(std::vector<CharClass> classes, std::string other_name, std::vector<double> indel,
               std::vector<double> sub);

  const std::vector<CharClass>& classes() const noexcept { return classes_; }
  const std::string& other_name() const noexcept { return other_name_; }
  std::size_t class_count() const noexcept { return classes_.size() + 1; }
  const std::vector<double>& indel() const noexcept { return indel_; }
  const std::vector<double>& sub() const noexcept { return sub_; }
  double indel(std::size_t c) const { return indel_[c]; }
  double sub(std::size_t a, std::size_t b) const { return sub_[a * class_count() + b]; }
  std::string class_name(std::size_t c) const;

  /// First class containing cp, else the catch-all index.
  std::size_t classify(char32_t cp) const;

  bool operator==(const WeightMatrix&) const = default;

 private:
  std::vector<CharClass> classes_;
  std::string other_name_ = "Other";
  std::vector<double> indel_;
  std::vector<double> sub_;
};

/// Substitution of two different characters costs deleting one and
/// inserting the other.
WeightMatrix derive_sub_as_indel_sum(const WeightMatrix& w);

/// Weight matrix with the given indel weights and indel-sum substitutions.
WeightMatrix indel_only_matrix(std::vector<CharClass> classes, std::string other_name, std::vector<double> indel);

std::size_t classify_char(char32_t cp, const WeightMatrix& w);

enum class DistanceKind { kBasic, kLevenshtein };

std::string_view distance_kind_name(DistanceKind kind);
DistanceKind distance_kind_from_name(std::string_view name);

struct DistanceConfig {
  DistanceKind kind = DistanceKind::kLevenshtein;
  WeightMatrix weights;

  /// The matrix actually used by the kernel (indel-sum substitutions for kBasic).
  WeightMatrix effective_weights() const;
  bool operator==(const DistanceConfig&) const = default;
};

void to_json(nlohmann::json& j, const WeightMatrix& w);
void from_json(const nlohmann::json& j, WeightMatrix& w);
void to_json(nlohmann::json& j, const DistanceConfig& config);
void from_json(const nlohmann::json& j, DistanceConfig& config);
std::string config_fingerprint(const DistanceConfig& config);

// ---------------------------------------------------------------------------
// Kernel

/// A string pre-split into codepoints and their class indices.
struct ClassifiedString {
  std::u32string chars;
  std::vector<std::uint16_t> classes;
};

ClassifiedString classify_string(std::string_view utf8, const WeightMatrix& w);

/// Weights in an arbitrary arithmetic type; the kernel is generic so exact
/// rational arithmetic can be substituted for double.
template <typename T>
struct WeightTable {
  std::size_t classes = 0;
  std::vector<T> indel;
  std::vector<T> sub;  // classes x classes

  T substitution(std::uint16_t a, std::uint16_t b) const { return sub[a * classes + b]; }
};

WeightTable<double> weight_table(const WeightMatrix& w);

/// Wagner-Fischer dynamic programme with two rolling rows sized by the
/// shorter string. `row` is scratch storage reused across calls.
template <typename T>
T weighted_edit_distance(const ClassifiedString& a, const ClassifiedString& b, const WeightTable<T>& w,
                         std::vector<T>& row) {
  const ClassifiedString& outer = a.chars.size() >= b.chars.size() ? a : b;
  const ClassifiedString& inner = a.chars.size() >= b.chars.size() ? b : a;
  const std::size_t m = inner.chars.size();
  row.assign(2 * (m + 1), T{});
  T* prev = row.data();
  T* cur = row.data() + m + 1;
  prev[0] = T{};
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + w.indel[inner.classes[j - 1]];
  for (std::size_t i = 1; i <= outer.chars.size(); ++i) {
    const char32_t oc = outer.chars[i - 1];
    const std::uint16_t ok = outer.classes[i - 1];
    const T drop = w.indel[ok];
    cur[0] = prev[0] + drop;
    for (std::size_t j = 1; j <= m; ++j) {
      const T diag =
          prev[j - 1] + (oc == inner.chars[j - 1] ? T{} : w.substitution(ok, inner.classes[j - 1]));
      const T up = prev[j] + drop;
      const T left = cur[j - 1] + w.indel[inner.classes[j - 1]];
      cur[j] = std::min(diag, std::min(up, left));
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double weighted_levenshtein(std::string_view a, std::string_view b, const WeightMatrix& w);
double basic_edit_distance(std::string_view a, std::string_view b, const WeightMatrix& w);

// ---------------------------------------------------------------------------
// Matrix

struct DistanceMatrix {
  Condensed<double> values;
  std::vector<std::string> value_index;  // abstracted values, mapping order
  std::string mapping_fingerprint;
  std::string fingerprint;

  std::size_t n() const noexcept { return values.n(); }
  bool operator==(const DistanceMatrix&) const = default;
};

void to_json(nlohmann::json& j, const DistanceMatrix& d);
void from_json(const nlohmann::json& j, DistanceMatrix& d);

struct MatrixProgress {
  std::atomic<std::uint64_t> done{0};
  std::atomic<std::uint64_t> total{0};
};

/// All pairwise distances over `values`. Work is split by rows across
/// `threads` workers; every entry is written by exactly one worker so the
/// result does not depend on the thread count.
Condensed<double> pairwise_distances(std::span<const std::string> values, const WeightMatrix& effective,
                                     unsigned threads = 1, MatrixProgress* progress = nullptr);

DistanceMatrix distance_matrix(const AbstractionMapping& mapping, const DistanceConfig& config,
                               unsigned threads = 1, MatrixProgress* progress = nullptr);

}  // namespace valclust
