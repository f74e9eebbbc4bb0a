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

#include "valclust/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>

#include "valclust/error.hpp"
#include "valclust/profiles.hpp"
#include "valclust/service.hpp"
#include "valclust/session.hpp"

namespace valclust {
namespace {

constexpr const char* kDataDirEnv = "VALCLUST_DATA_DIR";

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "'" + path.string() + "' is not valid JSON at byte " + std::to_string(e.byte));
  }
}

template <typename T>
T config_from(const nlohmann::json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, what + ": " + e.what());
  }
}

struct Globals {
  bool json = false;
  bool verbose = false;
  std::string data_dir;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  Globals g;

  std::filesystem::path data_dir() const {
    if (!g.data_dir.empty()) return g.data_dir;
    if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
    return {};
  }

  /// A session argument is a file path; a bare id is looked up in the data
  /// directory.
  std::filesystem::path session_path(const std::string& arg) const {
    std::filesystem::path p(arg);
    if (std::filesystem::exists(p) || arg.find('/') != std::string::npos) return p;
    const auto dir = data_dir();
    if (!dir.empty()) {
      for (const auto& candidate : {dir / arg, dir / (arg + ".json")}) {
        if (std::filesystem::exists(candidate)) return candidate;
      }
    }
    return p;
  }

  void emit(const nlohmann::json& j, const std::string& text) {
    if (g.json) {
      out_ << j.dump() << "\n";
    } else {
      out_ << text << "\n";
    }
  }

  void detail(const std::string& text) {
    if (g.verbose) err_ << text << "\n";
  }

  void save(const Session& s, const std::filesystem::path& path) {
    save_session(s, path);
    detail("wrote " + path.string());
  }

  void run_timed(Session& s, Stage stage, unsigned threads) {
    const auto start = std::chrono::steady_clock::now();
    s.run_stage(stage, {threads, nullptr});
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    detail(std::string(stage_name(stage)) + " finished in " + std::to_string(ms) + " ms");
  }

  std::string stage_line(const Session& s, Stage stage) {
    const auto r = result_summary(s, stage);
    switch (stage) {
      case Stage::kAbstract:
        return "abstraction: " + std::to_string(s.corpus().size()) + " values -> " + r["groups"].dump() + " groups";
      case Stage::kDistance: {
        const auto n = r["n"].get<std::size_t>();
        return "distance: " + std::to_string(n) + " values, " + std::to_string(Condensed<double>::pair_count(n)) +
               " pairs";
      }
      case Stage::kCluster:
        return "clustering: " + r["k"].dump() + " clusters, " + r["noise_abstracted_count"].dump() + " noise values";
      case Stage::kProject:
        return "embedding: " + r["points"].dump() + " points, stress " + r["stress"].dump();
    }
    return "";
  }

  void report(const Session& s, Stage stage) {
    emit({{"session", s.id()}, {"stage", stage_name(stage)}, {"result", result_summary(s, stage)}},
         stage_line(s, stage));
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner r(out, err);
  CLI::App app{"Clusters the values of a data field by syntactic similarity.", "valclust"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", r.g.json, "Machine-readable JSON output");
  app.add_flag("-v,--verbose", r.g.verbose, "Extra diagnostics on stderr");
  app.add_option("--data-dir", r.g.data_dir, std::string("Directory for session files (default: $") + kDataDirEnv + ")");

  std::function<void()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Read a values file and write a new session");
  std::string ingest_file;
  std::string csv_column;
  std::string encoding = "utf8";
  std::string empty_policy;
  std::string out_session;
  std::string session_id;
  std::string ingest_profile;
  ingest->add_option("file", ingest_file, "One value per line, or a CSV file with --csv-column")->required();
  ingest->add_option("--csv-column", csv_column, "CSV column by header name or zero-based index");
  ingest->add_option("--encoding", encoding, "Input encoding")->check(CLI::IsMember({"utf8", "latin1"}));
  ingest->add_option("--empty", empty_policy, "Empty values")->check(CLI::IsMember({"keep", "skip"}));
  ingest->add_option("--session", out_session, "Session file to write (default: <data-dir>/<id>.json)");
  ingest->add_option("--id", session_id, "Session id (default: derived from the values)");
  ingest->add_option("--profile", ingest_profile, "Apply a shipped profile")->check(CLI::IsMember(profile_names()));
  ingest->callback([&] {
    action = [&] {
      IngestOptions o;
      o.encoding = encoding == "latin1" ? Encoding::kLatin1 : Encoding::kUtf8;
      if (empty_policy == "keep") o.empty = EmptyPolicy::kKeep;
      if (empty_policy == "skip") o.empty = EmptyPolicy::kSkip;
      ValueCorpus corpus;
      if (csv_column.empty()) {
        corpus = ingest_lines(ingest_file, o);
      } else {
        const bool numeric = std::all_of(csv_column.begin(), csv_column.end(), ::isdigit);
        corpus = ingest_csv_column(ingest_file,
                                   numeric ? ColumnSelector(std::stoull(csv_column)) : ColumnSelector(csv_column), o);
      }
      const std::string id = session_id.empty() ? default_session_id(corpus) : session_id;
      Session s(id, std::move(corpus));
      if (!ingest_profile.empty()) s.apply_profile(profile(ingest_profile));
      std::filesystem::path path = out_session;
      if (path.empty()) {
        const auto dir = r.data_dir();
        if (!dir.empty()) std::filesystem::create_directories(dir);
        path = (dir.empty() ? std::filesystem::path(".") : dir) / (id + ".json");
      }
      r.save(s, path);
      r.emit({{"session", id},
              {"path", path.string()},
              {"source", s.corpus().source_label()},
              {"distinct", s.corpus().size()},
              {"total_occurrences", s.corpus().total_occurrences()}},
             "session " + id + ": " + std::to_string(s.corpus().size()) + " distinct values, " +
                 std::to_string(s.corpus().total_occurrences()) + " occurrences -> " + path.string());
    };
  });

  // Shared by the stage subcommands.
  std::string session_arg;
  unsigned threads = 1;
  auto add_session = [&](CLI::App* cmd) {
    cmd->add_option("-s,--session", session_arg, "Session file or id")->required();
  };

  // abstract
  auto* abstract_cmd = app.add_subcommand("abstract", "Configure and run the abstraction");
  std::string abstraction_file;
  std::string abstract_profile;
  add_session(abstract_cmd);
  auto* abs_cfg = abstract_cmd->add_option("--config", abstraction_file,
                                           "Abstraction config JSON, or {\"answers\": {question: bool}}");
  abstract_cmd->add_option("--profile", abstract_profile, "Use a shipped profile's abstraction")
      ->check(CLI::IsMember(profile_names()))
      ->excludes(abs_cfg);
  abstract_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  abstract_cmd->callback([&] {
    action = [&] {
      const auto path = r.session_path(session_arg);
      auto s = load_session(path);
      if (!abstract_profile.empty()) s.set_abstraction(profile(abstract_profile).abstraction);
      if (!abstraction_file.empty()) {
        const auto j = read_json_file(abstraction_file);
        if (j.is_object() && j.contains("answers")) {
          std::vector<std::pair<std::string, bool>> answers;
          for (const auto& [k, v] : j.at("answers").items()) {
            if (!v.is_boolean()) throw Error(ErrorCode::kInvalidConfig, "answer '" + k + "' must be true or false");
            answers.emplace_back(k, v.get<bool>());
          }
          const bool friendly = j.value("style", std::string("reserved")) == "friendly";
          s.set_abstraction(
              questionnaire_to_config(answers, friendly ? PlaceholderStyle::kFriendly : PlaceholderStyle::kReserved));
        } else {
          s.set_abstraction(config_from<AbstractionConfig>(j, "abstraction config"));
        }
      }
      for (const auto& w : compile_rules(s.abstraction_config()).warnings()) r.detail("warning: " + w);
      r.run_timed(s, Stage::kAbstract, threads);
      r.save(s, path);
      r.report(s, Stage::kAbstract);
    };
  });

  // distance
  auto* distance_cmd = app.add_subcommand("distance", "Configure weights and compute the distance matrix");
  std::string weights_file;
  std::string distance_profile;
  std::string kind;
  add_session(distance_cmd);
  auto* w_opt = distance_cmd->add_option("--weights", weights_file, "Weight matrix JSON");
  distance_cmd->add_option("--profile", distance_profile, "Use a shipped profile's weights")
      ->check(CLI::IsMember(profile_names()))
      ->excludes(w_opt);
  distance_cmd->add_option("--kind", kind, "Distance function")->check(CLI::IsMember({"basic", "levenshtein"}));
  distance_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  distance_cmd->callback([&] {
    action = [&] {
      const auto path = r.session_path(session_arg);
      auto s = load_session(path);
      DistanceConfig config = s.distance_config();
      if (!distance_profile.empty()) config = profile(distance_profile).distance;
      if (!weights_file.empty()) {
        const auto j = read_json_file(weights_file);
        if (j.is_object() && j.contains("kind")) {
          config = config_from<DistanceConfig>(j, "distance config");
        } else {
          config.weights = config_from<WeightMatrix>(j, "weight matrix");
        }
      }
      if (!kind.empty()) config.kind = distance_kind_from_name(kind);
      s.set_distance(config);
      r.run_timed(s, Stage::kDistance, threads);
      r.save(s, path);
      r.report(s, Stage::kDistance);
    };
  });

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "Configure and run the clustering");
  std::string cluster_file;
  std::string cluster_profile;
  std::string algorithm;
  std::string linkage;
  std::optional<double> threshold;
  std::optional<std::size_t> n_clusters;
  std::optional<std::size_t> k;
  std::optional<std::size_t> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<std::size_t> min_samples;
  add_session(cluster_cmd);
  auto* c_opt = cluster_cmd->add_option("--config", cluster_file, "Clustering config JSON");
  cluster_cmd->add_option("--profile", cluster_profile, "Start from a shipped profile's clustering")
      ->check(CLI::IsMember(profile_names()))
      ->excludes(c_opt);
  cluster_cmd->add_option("--algorithm", algorithm, "Algorithm")
      ->check(CLI::IsMember({"hierarchical", "kmedoids", "dbscan"}));
  cluster_cmd->add_option("--linkage", linkage, "Hierarchical linkage")
      ->check(CLI::IsMember({"complete", "single", "average"}));
  cluster_cmd->add_option("--distance-threshold", threshold, "Hierarchical: merge while linkage <= threshold");
  cluster_cmd->add_option("--n-clusters", n_clusters, "Hierarchical: number of clusters");
  cluster_cmd->add_option("--k", k, "k-medoids: number of medoids");
  cluster_cmd->add_option("--max-iter", max_iter, "k-medoids: swap iterations");
  cluster_cmd->add_option("--seed", seed, "k-medoids: scan-order seed");
  cluster_cmd->add_option("--eps", eps, "DBSCAN: neighbourhood radius");
  cluster_cmd->add_option("--min-samples", min_samples, "DBSCAN: neighbours for a core point");
  cluster_cmd->callback([&] {
    action = [&] {
      const auto path = r.session_path(session_arg);
      auto s = load_session(path);
      ClusteringConfig config = s.clustering_config();
      if (!cluster_profile.empty()) config = profile(cluster_profile).clustering;
      if (!cluster_file.empty()) config = config_from<ClusteringConfig>(read_json_file(cluster_file), "clustering config");
      if (!algorithm.empty()) config.algorithm = algorithm_from_name(algorithm);
      if (!linkage.empty()) config.hierarchical.linkage = linkage_from_name(linkage);
      if (threshold || n_clusters) {
        // Either flag replaces the configured stop criterion; both is an error.
        config.hierarchical.distance_threshold = threshold;
        config.hierarchical.n_clusters = n_clusters;
      }
      if (k) config.kmedoids.k = *k;
      if (max_iter) config.kmedoids.max_iter = *max_iter;
      if (seed) config.kmedoids.seed = *seed;
      if (eps) config.dbscan.eps = *eps;
      if (min_samples) config.dbscan.min_samples = *min_samples;
      s.set_clustering(config);
      r.run_timed(s, Stage::kCluster, 1);
      r.save(s, path);
      r.report(s, Stage::kCluster);
    };
  });

  // project
  auto* project_cmd = app.add_subcommand("project", "Compute the two-dimensional embedding");
  std::optional<std::uint64_t> project_seed;
  std::optional<std::size_t> project_iter;
  std::optional<double> tolerance;
  std::string init;
  add_session(project_cmd);
  project_cmd->add_option("--seed", project_seed, "Seed for random initialisation");
  project_cmd->add_option("--max-iter", project_iter, "SMACOF iterations");
  project_cmd->add_option("--tolerance", tolerance, "Relative stress improvement to stop at");
  project_cmd->add_option("--init", init, "Initial configuration")->check(CLI::IsMember({"classical", "random"}));
  project_cmd->callback([&] {
    action = [&] {
      const auto path = r.session_path(session_arg);
      auto s = load_session(path);
      ProjectionOptions o = s.projection_options();
      if (project_seed) o.seed = *project_seed;
      if (project_iter) o.max_iter = *project_iter;
      if (tolerance) o.tolerance = *tolerance;
      if (!init.empty()) o.init = init == "random" ? MdsInit::kRandom : MdsInit::kClassical;
      s.set_projection(o);
      r.run_timed(s, Stage::kProject, 1);
      r.save(s, path);
      r.report(s, Stage::kProject);
    };
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "Run every stage with the session's configuration");
  std::string run_profile;
  add_session(run_cmd);
  run_cmd->add_option("--profile", run_profile, "Apply a shipped profile first")->check(CLI::IsMember(profile_names()));
  run_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->callback([&] {
    action = [&] {
      const auto path = r.session_path(session_arg);
      auto s = load_session(path);
      if (!run_profile.empty()) s.apply_profile(profile(run_profile));
      nlohmann::json results = nlohmann::json::object();
      std::string text;
      for (auto st : {Stage::kAbstract, Stage::kDistance, Stage::kCluster, Stage::kProject}) {
        r.run_timed(s, st, threads);
        results[std::string(stage_name(st))] = result_summary(s, st);
        text += (text.empty() ? "" : "\n") + r.stage_line(s, st);
      }
      r.save(s, path);
      r.emit({{"session", s.id()}, {"results", results}}, text);
    };
  });

  // export
  auto* export_cmd = app.add_subcommand("export", "Write the cluster table and/or the session JSON");
  std::string table_path;
  std::string layout = "representatives";
  std::string json_path;
  add_session(export_cmd);
  auto* t_opt = export_cmd->add_option("--table", table_path, "Cluster table CSV to write");
  export_cmd->add_option("--layout", layout, "Table cells")->check(CLI::IsMember({"representatives", "originals"}));
  auto* j_opt = export_cmd->add_option("--session-json", json_path, "Copy of the session JSON to write");
  export_cmd->callback([&] {
    action = [&] {
      if (t_opt->count() == 0 && j_opt->count() == 0) {
        throw Error(ErrorCode::kInvalidArgument, "nothing to export: pass --table and/or --session-json");
      }
      const auto s = load_session(r.session_path(session_arg));
      nlohmann::json written = nlohmann::json::array();
      std::string text;
      if (!table_path.empty()) {
        export_cluster_table(s, table_path, layout_from_name(layout));
        written.push_back(table_path);
        text = "table (" + layout + ") -> " + table_path;
      }
      if (!json_path.empty()) {
        write_file_atomic(json_path, serialize_session(s));
        written.push_back(json_path);
        text += (text.empty() ? "" : "\n") + std::string("session -> ") + json_path;
      }
      r.emit({{"session", s.id()}, {"written", written}}, text);
    };
  });

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP API");
  int port = 8080;
  std::string bind = "127.0.0.1";
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--bind", bind, "Address to bind");
  serve_cmd->add_option("--threads", threads, "Distance-matrix workers per run")->check(CLI::PositiveNumber);
  serve_cmd->callback([&] {
    action = [&] {
      auto dir = r.data_dir();
      if (dir.empty()) dir = "valclust-data";
      Service service({dir, threads, "*"});
      err << "valclust: serving " << dir.string() << " on http://" << bind << ":" << port << "\n";
      if (!service.listen(bind, port)) {
        throw Error(ErrorCode::kIoError, "cannot listen on " + bind + ":" + std::to_string(port));
      }
    };
  });

  // profiles
  auto* profiles_cmd = app.add_subcommand("profiles", "List the shipped profiles");
  profiles_cmd->callback([&] {
    action = [&] {
      nlohmann::json list = nlohmann::json::array();
      std::string text;
      for (const auto& name : profile_names()) {
        list.push_back(profile(name));
        text += (text.empty() ? "" : "\n") + name;
      }
      r.emit({{"profiles", list}}, text);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Sub-command help is reported as a ParseError with exit code 0.
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return 0;
    }
    err << "error[invalid_argument]: " << e.what() << "\n";
    return 2;
  }

  try {
    action();
  } catch (const Error& e) {
    if (r.g.json) {
      out << nlohmann::json{{"error", error_body(e)}}.dump() << "\n";
    }
    err << "error[" << error_code_name(e.code()) << "]: " << e.what();
    if (e.stage()) err << " (stage: " << *e.stage() << ")";
    err << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace valclust
