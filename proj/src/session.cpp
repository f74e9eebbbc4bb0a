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

#include "valclust/session.hpp"

#include <fstream>
#include <sstream>

#include "valclust/error.hpp"
#include "valclust/fingerprint.hpp"

namespace valclust {
namespace {

DistanceConfig default_distance() {
  std::vector<CharClass> classes = {{"Letters", U"", {text::CharGroup::kLetter}},
                                    {"Digits", U"", {text::CharGroup::kDigit}}};
  return {DistanceKind::kLevenshtein, WeightMatrix(std::move(classes), "Special", {1, 1, 1}, std::vector<double>(9, 1.0))};
}

std::string mapping_fp(const ValueCorpus& corpus, const AbstractionConfig& config) {
  return chain_fingerprint(corpus.fingerprint(), config_fingerprint(config));
}

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kAbstract: return "abstraction";
    case Stage::kDistance: return "distance";
    case Stage::kCluster: return "clustering";
    case Stage::kProject: return "embedding";
  }
  return "abstraction";
}

Stage stage_from_name(std::string_view name) {
  if (name == "abstraction" || name == "abstract") return Stage::kAbstract;
  if (name == "distance") return Stage::kDistance;
  if (name == "clustering" || name == "cluster") return Stage::kCluster;
  if (name == "embedding" || name == "project" || name == "projection") return Stage::kProject;
  throw Error(ErrorCode::kInvalidArgument, "unknown stage '" + std::string(name) + "'");
}

Session::Session(std::string id, ValueCorpus corpus)
    : id_(std::move(id)), corpus_(std::move(corpus)), distance_(default_distance()) {}

std::string default_session_id(const ValueCorpus& corpus) { return "s-" + corpus.fingerprint().substr(0, 12); }

void Session::clear_from(Stage stage) {
  switch (stage) {
    case Stage::kAbstract:
      mapping_.reset();
      [[fallthrough]];
    case Stage::kDistance:
      matrix_.reset();
      result_.reset();
      embedding_.reset();
      break;
    case Stage::kCluster:
      result_.reset();
      break;
    case Stage::kProject:
      embedding_.reset();
      break;
  }
}

void Session::set_abstraction(AbstractionConfig config) {
  compile_rules(config);
  if (config == abstraction_) return;
  abstraction_ = std::move(config);
  clear_from(Stage::kAbstract);
}

void Session::set_distance(DistanceConfig config) {
  // Re-run the constructor's validation for matrices built elsewhere.
  config.weights = WeightMatrix(config.weights.classes(), config.weights.other_name(), config.weights.indel(),
                                config.weights.sub());
  if (config == distance_) return;
  distance_ = std::move(config);
  clear_from(Stage::kDistance);
}

void Session::set_clustering(ClusteringConfig config) {
  config.validate();
  if (config == clustering_) return;
  clustering_ = std::move(config);
  clear_from(Stage::kCluster);
}

void Session::set_projection(ProjectionOptions options) {
  if (options.max_iter < 1) throw Error(ErrorCode::kInvalidConfig, "max_iter must be >= 1");
  if (!(options.tolerance >= 0)) throw Error(ErrorCode::kInvalidConfig, "tolerance must be >= 0");
  if (options == projection_) return;
  projection_ = options;
  clear_from(Stage::kProject);
}

void Session::apply_profile(const Profile& p) {
  compile_rules(p.abstraction);
  p.clustering.validate();
  set_abstraction(p.abstraction);
  set_distance(p.distance);
  set_clustering(p.clustering);
}

void Session::record(Stage stage, std::string fp) {
  history_.push_back({history_.size() + 1, std::string(stage_name(stage)), std::move(fp)});
}

void Session::run_stage(Stage stage, const RunOptions& options) {
  switch (stage) {
    case Stage::kAbstract: {
      auto mapping = abstract(corpus_, abstraction_, options.threads);
      clear_from(Stage::kAbstract);
      mapping_ = std::move(mapping);
      record(stage, config_fingerprint(abstraction_));
      return;
    }
    case Stage::kDistance: {
      if (!mapping_) throw Error(ErrorCode::kStageOrder, "abstraction mapping missing", "abstraction");
      auto matrix = distance_matrix(*mapping_, distance_, options.threads, options.progress);
      clear_from(Stage::kDistance);
      matrix_ = std::move(matrix);
      record(stage, config_fingerprint(distance_));
      return;
    }
    case Stage::kCluster: {
      if (!mapping_) throw Error(ErrorCode::kStageOrder, "abstraction mapping missing", "abstraction");
      if (!matrix_) throw Error(ErrorCode::kStageOrder, "distance matrix missing", "distance");
      auto c = cluster(*matrix_, clustering_);
      summarize(c, *mapping_);
      result_ = std::move(c);
      record(stage, config_fingerprint(clustering_));
      return;
    }
    case Stage::kProject: {
      if (!mapping_) throw Error(ErrorCode::kStageOrder, "abstraction mapping missing", "abstraction");
      if (!matrix_) throw Error(ErrorCode::kStageOrder, "distance matrix missing", "distance");
      embedding_ = mds_project(*matrix_, projection_);
      record(stage, config_fingerprint(projection_));
      return;
    }
  }
}

void Session::run_all(const RunOptions& options) {
  for (auto s : {Stage::kAbstract, Stage::kDistance, Stage::kCluster, Stage::kProject}) run_stage(s, options);
}

Session run_stage(Session s, Stage stage, const RunOptions& options) {
  s.run_stage(stage, options);
  return s;
}

// ---------------------------------------------------------------------------
// Persistence

void to_json(nlohmann::json& j, const Session& s) {
  auto entries = nlohmann::json::array();
  for (const auto& e : s.corpus_.entries()) entries.push_back({e.value, e.count});
  auto history = nlohmann::json::array();
  for (const auto& h : s.history_) {
    history.push_back({{"step", h.step}, {"stage", h.stage}, {"fingerprint", h.fingerprint}});
  }
  auto or_null = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  const nlohmann::json results{{"abstraction", or_null(s.mapping_)},
                               {"distance", or_null(s.matrix_)},
                               {"clustering", or_null(s.result_)},
                               {"embedding", or_null(s.embedding_)}};
  j = nlohmann::json{
      {"schema_version", kSchemaVersion},
      {"id", s.id_},
      {"source",
       {{"label", s.corpus_.source_label()}, {"total_occurrences", s.corpus_.total_occurrences()}, {"entries", entries}}},
      {"abstraction", s.abstraction_},
      {"distance", s.distance_},
      {"clustering", s.clustering_},
      {"embedding", s.projection_},
      {"history", history},
      {"results", results},
  };
}

Session session_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw Error(ErrorCode::kParseError, "not a session file: missing schema_version");
  }
  const auto& version = j.at("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported session schema_version " + version.dump() +
                                                 " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  Session s;
  try {
    std::vector<CorpusEntry> entries;
    const auto& source = j.at("source");
    for (const auto& e : source.at("entries")) entries.push_back({e.at(0).get<std::string>(), e.at(1).get<std::uint64_t>()});
    s.id_ = j.at("id").get<std::string>();
    s.corpus_ = ValueCorpus(std::move(entries), source.at("label").get<std::string>());
    if (s.corpus_.total_occurrences() != source.at("total_occurrences").get<std::uint64_t>()) {
      throw Error(ErrorCode::kParseError, "source.total_occurrences does not match the entries");
    }
    s.abstraction_ = j.at("abstraction").get<AbstractionConfig>();
    s.distance_ = j.at("distance").get<DistanceConfig>();
    s.clustering_ = j.at("clustering").get<ClusteringConfig>();
    s.projection_ = j.at("embedding").get<ProjectionOptions>();
    for (const auto& h : j.at("history")) {
      s.history_.push_back(
          {h.at("step").get<std::uint64_t>(), h.at("stage").get<std::string>(), h.at("fingerprint").get<std::string>()});
    }
    const auto& results = j.at("results");
    auto present = [&](const char* key) { return results.contains(key) && !results.at(key).is_null(); };
    if (present("abstraction")) s.mapping_ = results.at("abstraction").get<AbstractionMapping>();
    if (present("distance")) s.matrix_ = results.at("distance").get<DistanceMatrix>();
    if (present("clustering")) s.result_ = results.at("clustering").get<Clustering>();
    if (present("embedding")) s.embedding_ = results.at("embedding").get<Embedding2D>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed session: ") + e.what());
  }

  auto stale = [](const char* what) {
    throw Error(ErrorCode::kFingerprintMismatch, std::string("stored ") + what + " does not match its configuration");
  };
  if (s.mapping_ && (s.mapping_->fingerprint != mapping_fp(s.corpus_, s.abstraction_) ||
                     s.mapping_->total_occurrences() != s.corpus_.total_occurrences())) {
    stale("abstraction mapping");
  }
  if (s.matrix_ && (!s.mapping_ || s.matrix_->fingerprint != chain_fingerprint(s.mapping_->fingerprint,
                                                                              config_fingerprint(s.distance_)))) {
    stale("distance matrix");
  }
  if (s.result_ && (!s.matrix_ || s.result_->fingerprint != chain_fingerprint(s.matrix_->fingerprint,
                                                                             config_fingerprint(s.clustering_)))) {
    stale("clustering");
  }
  if (s.embedding_ && (!s.matrix_ || s.embedding_->fingerprint != chain_fingerprint(s.matrix_->fingerprint,
                                                                                   config_fingerprint(s.projection_)))) {
    stale("embedding");
  }
  return s;
}

std::string serialize_session(const Session& s) { return nlohmann::json(s).dump(2) + "\n"; }

Session parse_session(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "corrupted session file at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return session_from_json(j);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIoError, "error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot replace '" + path.string() + "': " + ec.message());
}

void save_session(const Session& s, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_session(s));
}

Session load_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read session file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_session(ss.str());
}

// ---------------------------------------------------------------------------
// Cluster table

std::string_view layout_name(TableLayout l) {
  return l == TableLayout::kRepresentatives ? "representatives" : "originals";
}

TableLayout layout_from_name(std::string_view name) {
  if (name == "representatives") return TableLayout::kRepresentatives;
  if (name == "originals") return TableLayout::kOriginals;
  throw Error(ErrorCode::kInvalidArgument, "unknown table layout '" + std::string(name) + "'");
}

namespace {

std::vector<ExpandedCluster> expanded(const Session& s) {
  if (!s.clustering() || !s.mapping()) throw Error(ErrorCode::kResultMissing, "no clustering present", "clustering");
  return expand_to_originals(*s.clustering(), *s.mapping());
}

std::string cell(const std::string& value, std::uint64_t count) {
  return value + " (" + std::to_string(count) + ")";
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> cluster_table(const Session& s, TableLayout layout) {
  const auto clusters = expanded(s);
  std::vector<std::vector<std::string>> columns;
  for (const auto& c : clusters) {
    std::vector<std::string> col;
    col.push_back(c.id == kNoise ? "noise" : std::to_string(c.id));
    col.push_back(std::to_string(c.original_count));
    col.push_back(std::to_string(c.groups.size()));
    for (const auto& g : c.groups) {
      if (layout == TableLayout::kRepresentatives) {
        col.push_back(cell(g.representative, g.count));
      } else {
        for (const auto& o : g.originals) col.push_back(cell(o.value, o.count));
      }
    }
    columns.push_back(std::move(col));
  }
  std::size_t rows = 0;
  for (const auto& col : columns) rows = std::max(rows, col.size());
  std::vector<std::vector<std::string>> table(rows, std::vector<std::string>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < columns[c].size(); ++r) table[r][c] = columns[c][r];
  }
  return table;
}

std::string cluster_table_csv(const Session& s, TableLayout layout) {
  std::string out;
  for (const auto& row : cluster_table(s, layout)) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out.push_back(',');
      out += quote_csv(row[c]);
    }
    out += "\r\n";
  }
  return out;
}

void export_cluster_table(const Session& s, const std::filesystem::path& path, TableLayout layout) {
  write_file_atomic(path, cluster_table_csv(s, layout));
}

nlohmann::json cluster_table_json(const Session& s, TableLayout layout) {
  auto clusters = nlohmann::json::array();
  for (const auto& c : expanded(s)) {
    auto groups = nlohmann::json::array();
    for (const auto& g : c.groups) {
      nlohmann::json gj{{"representative", g.representative}, {"abstracted", g.abstracted}, {"count", g.count}};
      if (layout == TableLayout::kOriginals) {
        auto originals = nlohmann::json::array();
        for (const auto& o : g.originals) originals.push_back({{"value", o.value}, {"count", o.count}});
        gj["originals"] = originals;
      }
      groups.push_back(std::move(gj));
    }
    clusters.push_back({{"id", c.id == kNoise ? nlohmann::json("noise") : nlohmann::json(c.id)},
                        {"original_count", c.original_count},
                        {"abstracted_count", c.groups.size()},
                        {"groups", groups}});
  }
  return nlohmann::json{{"layout", layout_name(layout)}, {"clusters", clusters}};
}

}  // namespace valclust

namespace valclust {

nlohmann::json result_summary(const Session& s, Stage stage) {
  switch (stage) {
    case Stage::kAbstract:
      if (!s.mapping()) return nullptr;
      return {{"groups", s.mapping()->size()}, {"fingerprint", s.mapping()->fingerprint}};
    case Stage::kDistance:
      if (!s.matrix()) return nullptr;
      return {{"n", s.matrix()->n()}, {"fingerprint", s.matrix()->fingerprint}};
    case Stage::kCluster: {
      if (!s.clustering()) return nullptr;
      const auto& c = *s.clustering();
      auto clusters = nlohmann::json::array();
      for (std::size_t i = 0; i < c.clusters.size(); ++i) {
        clusters.push_back({{"id", i}, {"original_count", c.clusters[i].original_count},
                            {"abstracted_count", c.clusters[i].members.size()}});
      }
      return {{"k", c.k},
              {"noise_count", c.noise_count},
              {"noise_abstracted_count", c.noise.size()},
              {"clusters", clusters},
              {"fingerprint", c.fingerprint}};
    }
    case Stage::kProject:
      if (!s.embedding()) return nullptr;
      return {{"points", s.embedding()->coordinates.size()},
              {"stress", s.embedding()->stress},
              {"iterations", s.embedding()->iterations},
              {"fingerprint", s.embedding()->fingerprint}};
  }
  return nullptr;
}

nlohmann::json session_summary(const Session& s) {
  auto history = nlohmann::json::array();
  for (const auto& h : s.history()) {
    history.push_back({{"step", h.step}, {"stage", h.stage}, {"fingerprint", h.fingerprint}});
  }
  nlohmann::json results = nlohmann::json::object();
  for (auto st : {Stage::kAbstract, Stage::kDistance, Stage::kCluster, Stage::kProject}) {
    results[std::string(stage_name(st))] = result_summary(s, st);
  }
  return {{"schema_version", kSchemaVersion},
          {"id", s.id()},
          {"source",
           {{"label", s.corpus().source_label()},
            {"total_occurrences", s.corpus().total_occurrences()},
            {"distinct", s.corpus().size()}}},
          {"abstraction", s.abstraction_config()},
          {"distance", s.distance_config()},
          {"clustering", s.clustering_config()},
          {"embedding", s.projection_options()},
          {"history", history},
          {"results", results}};
}

}  // namespace valclust
