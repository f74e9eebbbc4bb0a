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

#include <filesystem>
#include <fstream>

#include "valclust/corpus.hpp"
#include "valclust/error.hpp"

using namespace valclust;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("valclust_corpus_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("lines are counted and ordered by count then codepoint") {
  const auto c = ingest_lines(write_temp("units.txt", "cm\ncm\nmm\n"));
  REQUIRE(c.size() == 2);
  CHECK(c.entries()[0] == CorpusEntry{"cm", 2});
  CHECK(c.entries()[1] == CorpusEntry{"mm", 1});
  CHECK(c.total_occurrences() == 3);

  const auto ties = ValueCorpus::from_values({"b", "a", "\xC3\xA4", "A"}, "x");
  CHECK(ties.entries()[0].value == "A");
  CHECK(ties.entries()[1].value == "a");
  CHECK(ties.entries()[2].value == "b");
  CHECK(ties.entries()[3].value == "\xC3\xA4");
}

TEST_CASE("empty file gives an empty corpus") {
  const auto c = ingest_lines(write_temp("empty.txt", ""));
  CHECK(c.empty());
  CHECK(c.total_occurrences() == 0);
}

TEST_CASE("87,042 lines with 179 distinct values") {
  std::string content;
  for (int i = 0; i < 87042; ++i) content += "v" + std::to_string(i % 179) + "\n";
  const auto c = ingest_lines(write_temp("big.txt", content));
  CHECK(c.size() == 179);
  CHECK(c.total_occurrences() == 87042);
}

TEST_CASE("interior whitespace and empty lines are preserved") {
  const auto c = ingest_lines_text("x 55 cm\n\n-\r\n x\n", "t");
  CHECK(c.size() == 4);
  CHECK(c.total_occurrences() == 4);
  bool has_empty = false;
  for (const auto& e : c.entries()) has_empty |= e.value.empty();
  CHECK(has_empty);

  IngestOptions skip;
  skip.empty = EmptyPolicy::kSkip;
  CHECK(ingest_lines_text("a\n\nb\n", "t", skip).total_occurrences() == 2);

  IngestOptions raw;
  raw.trim_trailing_newline = false;
  const auto kept = ingest_lines_text("a\na", "t", raw);
  CHECK(kept.size() == 2);
}

TEST_CASE("invalid UTF-8 reports the byte offset") {
  try {
    ingest_lines_text("ok\nab\xFF", "t");
    FAIL("expected encoding error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEncodingError);
    CHECK(std::string(e.what()).find("offset 5") != std::string::npos);
  }
  IngestOptions latin;
  latin.encoding = Encoding::kLatin1;
  const auto c = ingest_lines_text("Gra\xDF\n", "t", latin);
  CHECK(c.entries()[0].value == "Gra\xC3\x9F");
}

TEST_CASE("missing file is an io error naming the path") {
  try {
    ingest_lines("/nonexistent/values.txt");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoError);
    CHECK(std::string(e.what()).find("/nonexistent/values.txt") != std::string::npos);
  }
}

TEST_CASE("csv column by name and index") {
  const std::string csv = "id,unit\n1,cm\n2,cm\n3,-\n";
  const auto by_name = ingest_csv_text(csv, std::string("unit"), "t");
  CHECK(by_name.entries() == std::vector<CorpusEntry>{{"cm", 2}, {"-", 1}});
  const auto by_index = ingest_csv_text(csv, std::size_t{1}, "t");
  CHECK(by_index.entries() == by_name.entries());
}

TEST_CASE("csv errors") {
  try {
    ingest_csv_text("a,b\n1,2\n", std::size_t{5}, "t");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingColumn);
    CHECK(std::string(e.what()).find("0..1") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_csv_text("a,b\n1,2\n", std::string("c"), "t"), Error);
  try {
    ingest_csv_text("a,b\n1,2\n3\n", std::size_t{1}, "t");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_csv_text("a\n\"open\n", std::size_t{0}, "t"), Error);
}

TEST_CASE("csv quoting and empty cells") {
  const std::string csv = "unit,n\n\"10,5 cm\",1\n\"say \"\"hi\"\"\",2\n,3\n";
  const auto c = ingest_csv_text(csv, std::string("unit"), "t");
  CHECK(c.total_occurrences() == 2);
  bool quoted = false;
  for (const auto& e : c.entries()) quoted |= e.value == "10,5 cm";
  CHECK(quoted);

  IngestOptions keep;
  keep.empty = EmptyPolicy::kKeep;
  CHECK(ingest_csv_text(csv, std::string("unit"), "t", keep).total_occurrences() == 3);
}

TEST_CASE("ingest is idempotent") {
  const auto path = write_temp("idem.txt", "b\na\nb\n");
  CHECK(ingest_lines(path) == ingest_lines(path));
}
