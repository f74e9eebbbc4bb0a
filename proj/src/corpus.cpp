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

#include "valclust/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "valclust/error.hpp"
#include "valclust/fingerprint.hpp"
#include "valclust/text.hpp"

namespace valclust {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "error while reading '" + path.string() + "'");
  return ss.str();
}

// Returns UTF-8 text after validating or converting per the declared encoding.
std::string decode(std::string_view raw, Encoding encoding) {
  if (encoding == Encoding::kLatin1) return text::latin1_to_utf8(raw);
  text::decode_utf8(raw);
  return std::string(raw);
}

std::string column_label(const ColumnSelector& column) {
  if (const auto* name = std::get_if<std::string>(&column)) return *name;
  return "#" + std::to_string(std::get<std::size_t>(column));
}

}  // namespace

ValueCorpus::ValueCorpus(std::vector<CorpusEntry> entries, std::string source_label)
    : entries_(std::move(entries)), source_label_(std::move(source_label)) {
  std::sort(entries_.begin(), entries_.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.value < b.value;  // UTF-8 byte order equals codepoint order
  });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].count == 0) {
      throw Error(ErrorCode::kInvalidArgument, "corpus entry '" + entries_[i].value + "' has count 0");
    }
    total_ += entries_[i].count;
  }
  std::vector<std::string_view> values;
  values.reserve(entries_.size());
  for (const auto& e : entries_) values.push_back(e.value);
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate corpus values");
  }
}

ValueCorpus ValueCorpus::from_values(const std::vector<std::string>& values, std::string source_label) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& v : values) ++counts[v];
  std::vector<CorpusEntry> entries;
  entries.reserve(counts.size());
  for (auto& [value, count] : counts) entries.push_back({value, count});
  return ValueCorpus(std::move(entries), std::move(source_label));
}

std::string ValueCorpus::fingerprint() const {
  std::string buf;
  for (const auto& e : entries_) {
    buf += e.value;
    buf.push_back('\0');
    buf += std::to_string(e.count);
    buf.push_back('\n');
  }
  return valclust::fingerprint(buf);
}

ValueCorpus ingest_lines_text(std::string_view content, std::string source_label,
                              const IngestOptions& options) {
  const std::string utf8 = decode(content, options.encoding);
  const bool skip_empty = options.empty == EmptyPolicy::kSkip;
  std::vector<std::string> values;
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    std::size_t nl = utf8.find('\n', pos);
    std::string line;
    if (nl == std::string::npos) {
      line = utf8.substr(pos);
      pos = utf8.size();
    } else if (options.trim_trailing_newline) {
      line = utf8.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      pos = nl + 1;
    } else {
      line = utf8.substr(pos, nl + 1 - pos);
      pos = nl + 1;
    }
    if (skip_empty && line.empty()) continue;
    values.push_back(std::move(line));
  }
  return ValueCorpus::from_values(values, std::move(source_label));
}

ValueCorpus ingest_lines(const std::filesystem::path& path, const IngestOptions& options) {
  return ingest_lines_text(read_file(path), path.filename().string(), options);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  std::size_t i = 0;
  std::size_t line = 1;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < content.size()) {
    const char c = content[i];
    if (c == '"' && !field_started) {
      field_started = true;
      const std::size_t start_line = line;
      ++i;
      for (;;) {
        if (i >= content.size()) {
          throw Error(ErrorCode::kParseError,
                      "malformed CSV row " + std::to_string(start_line) + ": unterminated quoted field");
        }
        if (content[i] == '"') {
          if (i + 1 < content.size() && content[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (content[i] == '\n') ++line;
        field.push_back(content[i++]);
      }
      if (i < content.size() && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
        throw Error(ErrorCode::kParseError,
                    "malformed CSV row " + std::to_string(line) + ": text after closing quote");
      }
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      end_row();
      ++line;
      i += 2;
    } else if (c == '\n') {
      end_row();
      ++line;
      ++i;
    } else {
      if (c == '"') {
        throw Error(ErrorCode::kParseError,
                    "malformed CSV row " + std::to_string(line) + ": stray quote in unquoted field");
      }
      field_started = true;
      field.push_back(c);
      ++i;
    }
  }
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

ValueCorpus ingest_csv_text(std::string_view content, const ColumnSelector& column,
                            std::string source_label, const IngestOptions& options) {
  const std::string utf8 = decode(content, options.encoding);
  const auto rows = parse_csv(utf8);
  if (rows.empty()) throw Error(ErrorCode::kMissingColumn, "CSV has no header row");
  const auto& header = rows.front();
  std::size_t index = 0;
  if (const auto* name = std::get_if<std::string>(&column)) {
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      std::string known;
      for (const auto& h : header) known += (known.empty() ? "" : ", ") + h;
      throw Error(ErrorCode::kMissingColumn, "column '" + *name + "' not in header [" + known + "]");
    }
    index = static_cast<std::size_t>(it - header.begin());
  } else {
    index = std::get<std::size_t>(column);
    if (index >= header.size()) {
      throw Error(ErrorCode::kMissingColumn,
                  "column index " + std::to_string(index) + " out of range; valid range is 0.." +
                      std::to_string(header.size() - 1));
    }
  }
  const bool keep_empty = options.empty == EmptyPolicy::kKeep;
  std::vector<std::string> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (index >= row.size()) {
      throw Error(ErrorCode::kParseError, "malformed CSV row " + std::to_string(r + 1) + ": expected at least " +
                                              std::to_string(index + 1) + " fields, found " +
                                              std::to_string(row.size()));
    }
    if (row[index].empty() && !keep_empty) continue;
    values.push_back(row[index]);
  }
  source_label += ":" + column_label(column);
  return ValueCorpus::from_values(values, std::move(source_label));
}

ValueCorpus ingest_csv_column(const std::filesystem::path& path, const ColumnSelector& column,
                              const IngestOptions& options) {
  return ingest_csv_text(read_file(path), column, path.filename().string(), options);
}

}  // namespace valclust
