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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "valclust/abstraction.hpp"
#include "valclust/clustering.hpp"
#include "valclust/corpus.hpp"
#include "valclust/distance.hpp"
#include "valclust/profiles.hpp"
#include "valclust/projection.hpp"

namespace valclust {

inline constexpr int kSchemaVersion = 1;

enum class Stage { kAbstract, kDistance, kCluster, kProject };

/// "abstraction", "distance", "clustering", "embedding".
std::string_view stage_name(Stage s);
Stage stage_from_name(std::string_view name);

struct HistoryEntry {
  std::uint64_t step = 0;  // logical timestamp, 1-based
  std::string stage;
  std::string fingerprint;  // of the stage configuration that was run
  bool operator==(const HistoryEntry&) const = default;
};

struct RunOptions {
  unsigned threads = 1;
  MatrixProgress* progress = nullptr;
};

/// State of one iterative analysis. Each stage result is present only while
/// every upstream result is present and its fingerprint chains to the
/// current configuration; changing a configuration drops that stage's result
/// and everything downstream.
class Session {
 public:
  Session() = default;
  Session(std::string id, ValueCorpus corpus);

  const std::string& id() const noexcept { return id_; }
  const ValueCorpus& corpus() const noexcept { return corpus_; }

  const AbstractionConfig& abstraction_config() const noexcept { return abstraction_; }
  const DistanceConfig& distance_config() const noexcept { return distance_; }
  const ClusteringConfig& clustering_config() const noexcept { return clustering_; }
  const ProjectionOptions& projection_options() const noexcept { return projection_; }

  const std::optional<AbstractionMapping>& mapping() const noexcept { return mapping_; }
  const std::optional<DistanceMatrix>& matrix() const noexcept { return matrix_; }
  const std::optional<Clustering>& clustering() const noexcept { return result_; }
  const std::optional<Embedding2D>& embedding() const noexcept { return embedding_; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }

  // Setters validate first and leave the session untouched on error. Setting
  // a configuration equal to the current one keeps existing results.
  void set_abstraction(AbstractionConfig config);
  void set_distance(DistanceConfig config);
  void set_clustering(ClusteringConfig config);
  void set_projection(ProjectionOptions options);
  void apply_profile(const Profile& p);

  /// Throws Error(kStageOrder) naming the first missing upstream stage.
  void run_stage(Stage stage, const RunOptions& options = {});
  void run_all(const RunOptions& options = {});

  bool operator==(const Session&) const = default;

  friend void to_json(nlohmann::json& j, const Session& s);
  friend Session session_from_json(const nlohmann::json& j);

 private:
  void clear_from(Stage stage);
  void record(Stage stage, std::string fingerprint);

  std::string id_;
  ValueCorpus corpus_;
  AbstractionConfig abstraction_;
  DistanceConfig distance_;
  ClusteringConfig clustering_;
  ProjectionOptions projection_;
  std::optional<AbstractionMapping> mapping_;
  std::optional<DistanceMatrix> matrix_;
  std::optional<Clustering> result_;
  std::optional<Embedding2D> embedding_;
  std::vector<HistoryEntry> history_;
};

/// Functional form: returns the updated copy.
Session run_stage(Session s, Stage stage, const RunOptions& options = {});

/// Default id for a session over `corpus`: derived from its content.
std::string default_session_id(const ValueCorpus& corpus);

void to_json(nlohmann::json& j, const Session& s);
/// Throws Error(kVersionMismatch) for other schema versions and
/// Error(kFingerprintMismatch) when stored results do not chain.
Session session_from_json(const nlohmann::json& j);

std::string serialize_session(const Session& s);
Session parse_session(std::string_view text);
void save_session(const Session& s, const std::filesystem::path& path);
Session load_session(const std::filesystem::path& path);

enum class TableLayout { kRepresentatives, kOriginals };
std::string_view layout_name(TableLayout l);
TableLayout layout_from_name(std::string_view name);

/// Clusters as columns. Row 1: cluster ids; row 2: original-value counts;
/// row 3: abstracted-value counts; then one cell per representative (with
/// the count it represents) or per original value (with its count).
std::vector<std::vector<std::string>> cluster_table(const Session& s, TableLayout layout);
/// RFC 4180, CRLF line endings.
std::string cluster_table_csv(const Session& s, TableLayout layout);
void export_cluster_table(const Session& s, const std::filesystem::path& path, TableLayout layout);

/// Structured form of the table for the service.
nlohmann::json cluster_table_json(const Session& s, TableLayout layout);

/// Compact view of a session: configs, history and per-stage result
/// summaries (null when absent) without bulk data.
nlohmann::json session_summary(const Session& s);
nlohmann::json result_summary(const Session& s, Stage stage);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace valclust
