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
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace valclust {

struct CorpusEntry {
  std::string value;  // UTF-8
  std::uint64_t count = 0;

  bool operator==(const CorpusEntry&) const = default;
};

/// Deduplicated, counted values of one data field. Entries are ordered by
/// descending count, ties by codepoint order of the value.
class ValueCorpus {
 public:
  ValueCorpus() = default;
  ValueCorpus(std::vector<CorpusEntry> entries, std::string source_label);

  /// Counts the given values (duplicates allowed) and builds the ordered corpus.
  static ValueCorpus from_values(const std::vector<std::string>& values, std::string source_label);

  const std::vector<CorpusEntry>& entries() const noexcept { return entries_; }
  const std::string& source_label() const noexcept { return source_label_; }
  std::uint64_t total_occurrences() const noexcept { return total_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Stable content hash over labels-independent content (values and counts).
  std::string fingerprint() const;

  bool operator==(const ValueCorpus&) const = default;

 private:
  std::vector<CorpusEntry> entries_;
  std::string source_label_;
  std::uint64_t total_ = 0;
};

enum class Encoding { kUtf8, kLatin1 };

enum class EmptyPolicy {
  kDefault,  // keep for line input, skip for CSV cells
  kKeep,
  kSkip,
};

struct IngestOptions {
  Encoding encoding = Encoding::kUtf8;
  EmptyPolicy empty = EmptyPolicy::kDefault;
  bool trim_trailing_newline = true;  // also strips a CR of a CRLF terminator
};

using ColumnSelector = std::variant<std::string, std::size_t>;

ValueCorpus ingest_lines(const std::filesystem::path& path, const IngestOptions& options = {});
ValueCorpus ingest_csv_column(const std::filesystem::path& path, const ColumnSelector& column,
                              const IngestOptions& options = {});

/// In-memory variants used by the service for uploaded content.
ValueCorpus ingest_lines_text(std::string_view content, std::string source_label,
                              const IngestOptions& options = {});
ValueCorpus ingest_csv_text(std::string_view content, const ColumnSelector& column,
                            std::string source_label, const IngestOptions& options = {});

/// RFC 4180 record splitting; exposed for the export writer's tests.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);

}  // namespace valclust
