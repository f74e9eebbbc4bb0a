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

#include "valclust/service.hpp"

#include <httplib.h>

#include <iostream>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "valclust/profiles.hpp"
#include "valclust/session.hpp"

namespace valclust {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kResultMissing: return 404;
    case ErrorCode::kStageOrder:
    case ErrorCode::kLocked:
    case ErrorCode::kAlreadyExists: return 409;
    case ErrorCode::kInvalidConfig: return 422;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEncodingError:
    case ErrorCode::kParseError:
    case ErrorCode::kMissingColumn: return 400;
    case ErrorCode::kResourceExhausted: return 503;
    case ErrorCode::kIoError:
    case ErrorCode::kFingerprintMismatch:
    case ErrorCode::kVersionMismatch: return 500;
  }
  return 500;
}

nlohmann::json error_body(const Error& e) {
  nlohmann::json j{{"code", error_code_name(e.code())}, {"message", e.what()}};
  if (e.stage()) j["stage"] = *e.stage();
  return j;
}

namespace {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

struct Entry {
  std::shared_mutex mutex;
  Session session;
  MatrixProgress progress;
  std::atomic<bool> writer{false};  // one mutation at a time; others get kLocked
  std::atomic<bool> running{false};
  std::atomic<int> running_stage{-1};
};

void send_json(httplib::Response& res, const nlohmann::json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("request body is not valid JSON: ") + e.what());
  }
}

template <typename T>
T parse_config(const nlohmann::json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": " + e.what());
  }
}

std::size_t param_size(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const auto v = req.get_param_value(name);
  try {
    std::size_t pos = 0;
    const auto n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("query parameter '") + name + "' must be a non-negative integer");
  }
}

ColumnSelector column_selector(const nlohmann::json& column) {
  if (column.is_number_unsigned()) return column.get<std::size_t>();
  if (column.is_string()) return column.get<std::string>();
  throw Error(ErrorCode::kInvalidArgument, "'column' must be a header name or a zero-based index");
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Entry>> sessions;

  explicit Impl(ServiceOptions o) : options(std::move(o)) {
    std::filesystem::create_directories(options.data_dir);
    load_existing();
    routes();
  }

  std::filesystem::path file_for(const std::string& id) const { return options.data_dir / (id + ".json"); }

  void load_existing() {
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(options.data_dir)) {
      if (f.is_regular_file() && f.path().extension() == ".json") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        auto s = load_session(f);
        auto entry = std::make_shared<Entry>();
        const auto id = s.id();
        entry->session = std::move(s);
        sessions[id] = std::move(entry);
      } catch (const Error& e) {
        std::cerr << "valclust: skipping " << f.string() << ": " << e.what() << "\n";
      }
    }
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(registry_mutex);
    const auto it = sessions.find(id);
    if (it == sessions.end()) throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'");
    return it->second;
  }

  /// Applies `fn` to a copy; the copy replaces the stored session only once
  /// it is on disk. Readers see the old state until then.
  template <typename Fn>
  nlohmann::json mutate(const std::string& id, Fn&& fn) {
    auto entry = find(id);
    if (entry->writer.exchange(true)) throw Error(ErrorCode::kLocked, "session '" + id + "' is busy");
    struct Release {
      Entry& e;
      ~Release() { e.writer = false; }
    } release{*entry};
    Session copy;
    {
      std::shared_lock lock(entry->mutex);
      copy = entry->session;
    }
    nlohmann::json out = fn(copy, *entry);
    save_session(copy, file_for(id));
    std::unique_lock lock(entry->mutex);
    entry->session = std::move(copy);
    return out;
  }

  template <typename Fn>
  void read(const std::string& id, Fn&& fn) {
    auto entry = find(id);
    std::shared_lock lock(entry->mutex);
    fn(entry->session);
  }

  Handler guarded(Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send_json(res, error_body(e), http_status(e.code()));
      } catch (const std::exception& e) {
        send_json(res, {{"code", "internal"}, {"message", e.what()}}, 500);
      }
    };
  }

  ValueCorpus corpus_from_request(const httplib::Request& req, nlohmann::json& extra) {
    IngestOptions ingest;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) throw Error(ErrorCode::kInvalidArgument, "multipart upload needs a 'file' part");
      const auto file = req.get_file_value("file");
      auto field = [&](const char* name) { return req.has_file(name) ? req.get_file_value(name).content : ""; };
      if (field("encoding") == "latin1") ingest.encoding = Encoding::kLatin1;
      for (const char* key : {"id", "profile"}) {
        if (req.has_file(key)) extra[key] = field(key);
      }
      const std::string label = file.filename.empty() ? "upload" : file.filename;
      const auto column = field("column");
      if (field("format") == "csv" || !column.empty()) {
        if (column.empty()) throw Error(ErrorCode::kInvalidArgument, "CSV upload needs a 'column' field");
        const bool numeric = std::all_of(column.begin(), column.end(), ::isdigit);
        return ingest_csv_text(file.content, numeric ? ColumnSelector(std::stoull(column)) : ColumnSelector(column),
                               label, ingest);
      }
      return ingest_lines_text(file.content, label, ingest);
    }
    if (req.get_header_value("Content-Type").rfind("text/plain", 0) == 0) {
      return ingest_lines_text(req.body, "upload", ingest);
    }
    const auto body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    for (const char* key : {"id", "profile"}) {
      if (body.contains(key)) extra[key] = body.at(key);
    }
    const std::string label = body.value("label", std::string("inline"));
    if (body.value("encoding", std::string("utf8")) == "latin1") ingest.encoding = Encoding::kLatin1;
    if (body.contains("values")) {
      std::vector<std::string> values;
      try {
        values = body.at("values").get<std::vector<std::string>>();
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "'values' must be an array of strings");
      }
      for (const auto& v : values) text::decode_utf8(v);
      return ValueCorpus::from_values(values, label);
    }
    if (body.contains("text")) {
      const auto content = body.at("text").get<std::string>();
      if (body.value("format", std::string("lines")) == "csv") {
        if (!body.contains("column")) throw Error(ErrorCode::kInvalidArgument, "CSV input needs 'column'");
        return ingest_csv_text(content, column_selector(body.at("column")), label, ingest);
      }
      return ingest_lines_text(content, label, ingest);
    }
    throw Error(ErrorCode::kInvalidArgument, "request needs 'values' or 'text'");
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    nlohmann::json extra = nlohmann::json::object();
    auto corpus = corpus_from_request(req, extra);
    std::string id = extra.contains("id") ? extra["id"].get<std::string>() : default_session_id(corpus);
    const bool id_ok = !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '-' || c == '_';
    });
    if (!id_ok) throw Error(ErrorCode::kInvalidArgument, "session id must be 1-64 characters of [A-Za-z0-9_-]");

    Session s(id, std::move(corpus));
    if (extra.contains("profile")) s.apply_profile(profile(extra["profile"].get<std::string>()));

    std::lock_guard lock(registry_mutex);
    if (const auto it = sessions.find(id); it != sessions.end()) {
      std::shared_lock read_lock(it->second->mutex);
      if (it->second->session.corpus() != s.corpus()) {
        throw Error(ErrorCode::kAlreadyExists, "session '" + id + "' exists with different values");
      }
      send_json(res, session_summary(it->second->session), 200);
      return;
    }
    save_session(s, file_for(id));
    auto entry = std::make_shared<Entry>();
    entry->session = std::move(s);
    send_json(res, session_summary(entry->session), 201);
    sessions[id] = std::move(entry);
  }

  nlohmann::json run(Session& s, Entry& entry, const std::string& stage_param, unsigned threads) {
    std::vector<Stage> stages;
    if (stage_param.empty() || stage_param == "all") {
      stages = {Stage::kAbstract, Stage::kDistance, Stage::kCluster, Stage::kProject};
    } else {
      stages = {stage_from_name(stage_param)};
    }
    entry.running = true;
    struct Reset {
      Entry& e;
      ~Reset() {
        e.running = false;
        e.running_stage = -1;
      }
    } reset{entry};
    for (auto st : stages) {
      entry.running_stage = static_cast<int>(st);
      entry.progress.done = 0;
      entry.progress.total = 0;
      s.run_stage(st, {threads, &entry.progress});
    }
    if (stages.size() == 1) {
      return {{"stage", stage_name(stages[0])}, {"result", result_summary(s, stages[0])}};
    }
    nlohmann::json results = nlohmann::json::object();
    for (auto st : stages) results[std::string(stage_name(st))] = result_summary(s, st);
    return {{"stage", "all"}, {"results", results}};
  }

  void routes() {
    const std::string id_re = "/sessions/([A-Za-z0-9_-]+)";
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });

    server.Get("/profiles", guarded([](const httplib::Request&, httplib::Response& res) {
      auto list = nlohmann::json::array();
      for (const auto& name : profile_names()) list.push_back(profile(name));
      send_json(res, {{"profiles", list}});
    }));

    server.Get("/questionnaire", guarded([](const httplib::Request&, httplib::Response& res) {
      auto list = nlohmann::json::array();
      for (const auto& q : questionnaire()) list.push_back({{"id", q.id}, {"text", q.text}});
      send_json(res, {{"questions", list}});
    }));

    server.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(registry_mutex);
      auto ids = nlohmann::json::array();
      for (const auto& [id, e] : sessions) ids.push_back(id);
      send_json(res, {{"sessions", ids}});
    }));

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) { create(req, res); }));

    server.Get(id_re, guarded([this](const httplib::Request& req, httplib::Response& res) {
      read(req.matches[1], [&](const Session& s) { send_json(res, session_summary(s)); });
    }));

    server.Put(id_re + "/abstraction", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      AbstractionConfig config;
      if (body.is_object() && body.contains("answers")) {
        std::vector<std::pair<std::string, bool>> answers;
        try {
          for (const auto& [k, v] : body.at("answers").items()) answers.emplace_back(k, v.get<bool>());
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kInvalidConfig, std::string("answers: ") + e.what());
        }
        const auto style = body.value("style", std::string("reserved")) == "friendly" ? PlaceholderStyle::kFriendly
                                                                                      : PlaceholderStyle::kReserved;
        config = questionnaire_to_config(answers, style);
      } else {
        config = parse_config<AbstractionConfig>(body, "abstraction config");
      }
      send_json(res, mutate(req.matches[1], [&](Session& s, Entry&) {
                  s.set_abstraction(config);
                  return session_summary(s);
                }));
    }));

    server.Put(id_re + "/distance", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto config = parse_config<DistanceConfig>(parse_body(req), "distance config");
      send_json(res, mutate(req.matches[1], [&](Session& s, Entry&) {
                  s.set_distance(config);
                  return session_summary(s);
                }));
    }));

    server.Put(id_re + "/clustering", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto config = parse_config<ClusteringConfig>(parse_body(req), "clustering config");
      send_json(res, mutate(req.matches[1], [&](Session& s, Entry&) {
                  s.set_clustering(config);
                  return session_summary(s);
                }));
    }));

    server.Put(id_re + "/embedding", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto options = parse_config<ProjectionOptions>(parse_body(req), "embedding options");
      send_json(res, mutate(req.matches[1], [&](Session& s, Entry&) {
                  s.set_projection(options);
                  return session_summary(s);
                }));
    }));

    server.Put(id_re + "/profile", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      if (!body.is_object() || !body.contains("name") || !body["name"].is_string()) {
        throw Error(ErrorCode::kInvalidArgument, "body needs a 'name' string");
      }
      const auto p = profile(body["name"].get<std::string>());
      send_json(res, mutate(req.matches[1], [&](Session& s, Entry&) {
                  s.apply_profile(p);
                  return session_summary(s);
                }));
    }));

    server.Post(id_re + "/run", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string stage = req.has_param("stage") ? req.get_param_value("stage") : "all";
      const auto threads = static_cast<unsigned>(param_size(req, "threads", options.threads));
      send_json(res, mutate(req.matches[1], [&](Session& s, Entry& e) { return run(s, e, stage, threads); }));
    }));

    server.Get(id_re + "/progress", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto e = find(req.matches[1]);
      const auto done = e->progress.done.load();
      const auto total = e->progress.total.load();
      const int stage = e->running_stage.load();
      send_json(res, {{"running", e->running.load()},
                      {"stage", stage < 0 ? nlohmann::json(nullptr)
                                          : nlohmann::json(stage_name(static_cast<Stage>(stage)))},
                      {"done", done},
                      {"total", total},
                      {"fraction", total == 0 ? 0.0 : static_cast<double>(done) / static_cast<double>(total)}});
    }));

    server.Get(id_re + "/preview", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto limit = param_size(req, "limit", 100);
      read(req.matches[1], [&](const Session& s) {
        auto groups = nlohmann::json::array();
        for (const auto& g : preview(s.corpus(), s.abstraction_config(), limit)) {
          auto originals = nlohmann::json::array();
          for (const auto& o : g.originals) originals.push_back({{"value", o.value}, {"count", o.count}});
          groups.push_back({{"abstracted", g.abstracted},
                            {"representative", g.representative},
                            {"count", g.total_count()},
                            {"originals", originals}});
        }
        send_json(res, {{"limit", limit}, {"groups", groups}});
      });
    }));

    server.Get(id_re + "/table", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto layout =
          layout_from_name(req.has_param("layout") ? req.get_param_value("layout") : "representatives");
      read(req.matches[1], [&](const Session& s) { send_json(res, cluster_table_json(s, layout)); });
    }));

    server.Get(id_re + "/scatter", guarded([this](const httplib::Request& req, httplib::Response& res) {
      read(req.matches[1], [&](const Session& s) {
        if (!s.embedding()) throw Error(ErrorCode::kResultMissing, "no embedding present", "embedding");
        if (!s.clustering()) throw Error(ErrorCode::kResultMissing, "no clustering present", "clustering");
        const auto points = scatter_payload(*s.embedding(), *s.clustering(), *s.mapping());
        send_json(res, {{"points", points}, {"stress", s.embedding()->stress}, {"palette_size", kPaletteSize}});
      });
    }));

    server.Get(id_re + "/export\\.csv", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto layout =
          layout_from_name(req.has_param("layout") ? req.get_param_value("layout") : "representatives");
      read(req.matches[1], [&](const Session& s) {
        res.set_content(cluster_table_csv(s, layout), "text/csv; charset=utf-8");
        res.set_header("Content-Disposition", "attachment; filename=\"" + s.id() + ".csv\"");
      });
    }));

    server.Get(id_re + "/export\\.json", guarded([this](const httplib::Request& req, httplib::Response& res) {
      read(req.matches[1], [&](const Session& s) {
        res.set_content(serialize_session(s), "application/json");
        res.set_header("Content-Disposition", "attachment; filename=\"" + s.id() + ".json\"");
      });
    }));
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }
void Service::stop() {
  if (impl_) impl_->server.stop();
}
void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace valclust
