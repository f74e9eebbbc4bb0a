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
#include <httplib.h>

#include <chrono>
#include <random>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "valclust/cli.hpp"
#include "valclust/service.hpp"

using namespace valclust;
using nlohmann::json;
using support::TempDir;

namespace {

/// Service on an ephemeral port, served from a background thread.
class Running {
 public:
  explicit Running(const std::filesystem::path& data_dir) : service_(ServiceOptions{data_dir, 1, "*"}) {
    port_ = service_.bind_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_.listen_after_bind(); });
    service_.wait_until_ready();
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(120, 0);
    return c;
  }

 private:
  Service service_;
  int port_ = -1;
  std::thread thread_;
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

httplib::Result post_json(httplib::Client& c, const std::string& path, const json& j) {
  return c.Post(path, j.dump(), "application/json");
}

httplib::Result put_json(httplib::Client& c, const std::string& path, const json& j) {
  return c.Put(path, j.dump(), "application/json");
}

std::string create_units(httplib::Client& c, const std::string& id) {
  const auto r = post_json(c, "/sessions",
                           {{"text", support::slurp(support::fixture("measurement_units_179.txt"))},
                            {"label", "units"},
                            {"id", id},
                            {"profile", "measurement-unit"}});
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return "/sessions/" + id;
}

}  // namespace

TEST_CASE("discovery endpoints") {
  TempDir dir("svc");
  Running svc(dir.path());
  auto c = svc.client();
  CHECK(body(c.Get("/health"))["status"] == "ok");
  const auto profiles = body(c.Get("/profiles"))["profiles"];
  CHECK(profiles.size() == 4);
  CHECK(body(c.Get("/questionnaire"))["questions"].size() == 9);
  CHECK(body(c.Get("/sessions"))["sessions"].empty());

  const auto r = c.Get("/health");
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto pre = c.Options("/sessions");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("PUT") != std::string::npos);
}

TEST_CASE("creating sessions") {
  TempDir dir("svc");
  Running svc(dir.path());
  auto c = svc.client();

  const auto created = post_json(c, "/sessions", {{"values", {"5 cm", "5 cm", "mm"}}, {"id", "small"}});
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto summary = json::parse(created->body);
  CHECK(summary["id"] == "small");
  CHECK(summary["source"]["total_occurrences"] == 3);
  CHECK(summary["source"]["distinct"] == 2);

  // same values again is idempotent, different values conflict
  CHECK(post_json(c, "/sessions", {{"values", {"5 cm", "mm", "5 cm"}}, {"id", "small"}})->status == 200);
  const auto clash = post_json(c, "/sessions", {{"values", {"x"}}, {"id", "small"}});
  CHECK(clash->status == 409);
  CHECK(json::parse(clash->body)["code"] == "already_exists");

  const auto plain = c.Post("/sessions", "a\nb\nb\n", "text/plain");
  REQUIRE(plain);
  CHECK(plain->status == 201);
  CHECK(json::parse(plain->body)["id"].get<std::string>().rfind("s-", 0) == 0);

  httplib::MultipartFormDataItems items = {
      {"file", "name,size\nvase,10 cm\nbowl,\"3,5 cm\"\n", "objects.csv", "text/csv"},
      {"column", "size", "", ""},
      {"id", "upload", "", ""},
  };
  const auto multipart = c.Post("/sessions", items);
  REQUIRE(multipart);
  CHECK(multipart->status == 201);
  CHECK(json::parse(multipart->body)["source"]["label"] == "objects.csv:size");

  const auto missing_column = c.Post("/sessions", httplib::MultipartFormDataItems{
                                                      {"file", "a,b\n1,2\n", "t.csv", "text/csv"},
                                                      {"column", "nope", "", ""},
                                                  });
  CHECK(missing_column->status == 400);
  CHECK(json::parse(missing_column->body)["code"] == "missing_column");

  CHECK(c.Post("/sessions", "{", "application/json")->status == 400);
  CHECK(post_json(c, "/sessions", {{"values", {"a"}}, {"id", "bad id!"}})->status == 400);
  CHECK(body(c.Get("/sessions"))["sessions"].size() == 3);
}

TEST_CASE("errors map to status codes") {
  TempDir dir("svc");
  Running svc(dir.path());
  auto c = svc.client();

  const auto unknown = c.Get("/sessions/nobody");
  CHECK(unknown->status == 404);
  CHECK(json::parse(unknown->body)["code"] == "not_found");

  const auto base = create_units(c, "units");
  REQUIRE(c.Post(base + "/run?stage=abstraction")->status == 200);
  const auto order = c.Post(base + "/run?stage=clustering");
  CHECK(order->status == 409);
  CHECK(json::parse(order->body)["code"] == "stage_order");
  CHECK(json::parse(order->body)["stage"] == "distance");

  const auto bad = put_json(c, base + "/clustering",
                            {{"algorithm", "hierarchical"},
                             {"hierarchical", {{"linkage", "average"}, {"distance_threshold", 2}, {"n_clusters", 3}}}});
  CHECK(bad->status == 422);
  CHECK(json::parse(bad->body)["code"] == "invalid_config");

  CHECK(c.Post(base + "/run?stage=sideways")->status == 400);
  CHECK(c.Get(base + "/preview?limit=ten")->status == 400);
  CHECK(put_json(c, base + "/profile", {{"name", "no-such-profile"}})->status == 404);
}

TEST_CASE("changing abstraction removes the scatter") {
  TempDir dir("svc");
  Running svc(dir.path());
  auto c = svc.client();
  const auto base = create_units(c, "units");

  const auto run = c.Post(base + "/run");
  REQUIRE(run->status == 200);
  const auto results = json::parse(run->body)["results"];
  CHECK(results["abstraction"]["groups"] == 22);
  CHECK(results["clustering"]["k"] == 9);

  const auto scatter = body(c.Get(base + "/scatter"));
  CHECK(scatter["points"].size() == 22);
  CHECK(scatter["palette_size"].get<int>() >= 9);

  const auto preview = body(c.Get(base + "/preview?limit=5"));
  CHECK(preview["groups"].size() == 5);

  const auto table = body(c.Get(base + "/table?layout=originals"));
  CHECK(table["layout"] == "originals");

  REQUIRE(put_json(c, base + "/abstraction", {{"answers", {{"letter_case", true}}}, {"style", "friendly"}})->status == 200);
  const auto gone = c.Get(base + "/scatter");
  CHECK(gone->status == 404);
  CHECK(json::parse(gone->body)["code"] == "result_missing");
  CHECK(json::parse(gone->body)["stage"] == "embedding");
  CHECK(body(c.Get(base))["results"]["abstraction"].is_null());
}

TEST_CASE("a second mutation during a run is refused") {
  TempDir dir("svc");
  Running svc(dir.path());
  auto c = svc.client();

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> letter('a', 'z');
  std::uniform_int_distribution<int> len(8, 16);
  std::string text;
  for (int i = 0; i < 1500; ++i) {
    const int n = len(rng);
    for (int k = 0; k < n; ++k) text.push_back(static_cast<char>(letter(rng)));
    text.push_back('\n');
  }
  REQUIRE(post_json(c, "/sessions", {{"text", text}, {"id", "big"}})->status == 201);
  REQUIRE(put_json(c, "/sessions/big/abstraction", json::object())->status == 200);
  REQUIRE(c.Post("/sessions/big/run?stage=abstraction")->status == 200);

  int first_status = 0;
  std::thread runner([&] {
    auto c2 = svc.client();
    first_status = c2.Post("/sessions/big/run?stage=distance")->status;
  });

  bool saw_running = false;
  for (int i = 0; i < 2000 && !saw_running; ++i) {
    const auto p = body(c.Get("/sessions/big/progress"));
    saw_running = p["running"].get<bool>() && p["stage"] == "distance";
    if (!saw_running) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  REQUIRE(saw_running);
  const auto second = c.Post("/sessions/big/run?stage=distance");
  const auto reading = c.Get("/sessions/big");
  runner.join();

  CHECK(second->status == 409);
  CHECK(json::parse(second->body)["code"] == "locked");
  CHECK(reading->status == 200);
  CHECK(first_status == 200);
  const auto done = body(c.Get("/sessions/big/progress"));
  CHECK_FALSE(done["running"].get<bool>());
}

TEST_CASE("sessions survive a restart") {
  TempDir dir("svc");
  std::vector<std::string> before;
  const std::vector<std::string> paths = {"", "/table", "/scatter", "/export.csv?layout=originals", "/export.json"};
  {
    Running svc(dir.path());
    auto c = svc.client();
    const auto base = create_units(c, "keep");
    REQUIRE(c.Post(base + "/run?threads=2")->status == 200);
    for (const auto& p : paths) before.push_back(c.Get(base + p)->body);
  }
  Running svc(dir.path());
  auto c = svc.client();
  CHECK(body(c.Get("/sessions"))["sessions"] == json::array({"keep"}));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    CAPTURE(paths[i]);
    CHECK(c.Get("/sessions/keep" + paths[i])->body == before[i]);
  }
  const auto csv = c.Get("/sessions/keep/export.csv");
  CHECK(csv->get_header_value("Content-Type").rfind("text/csv", 0) == 0);
  CHECK(csv->body.find("\r\n") != std::string::npos);
}

TEST_CASE("service and command line produce the same files") {
  TempDir dir("svc");
  const auto fixture = support::fixture("measurement_units_179.txt");
  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(run_cli({"ingest", fixture.string(), "--session", dir / "cli.json", "--id", "same", "--profile",
                   "measurement-unit"},
                  out, err) == 0);
  REQUIRE(run_cli({"run", "-s", dir / "cli.json"}, out, err) == 0);
  REQUIRE(run_cli({"export", "-s", dir / "cli.json", "--table", dir / "cli.csv"}, out, err) == 0);

  TempDir data("svc-data");
  Running svc(data.path());
  auto c = svc.client();
  httplib::MultipartFormDataItems items = {
      {"file", support::slurp(fixture), fixture.filename().string(), "text/plain"},
      {"id", "same", "", ""},
      {"profile", "measurement-unit", "", ""},
  };
  REQUIRE(c.Post("/sessions", items)->status == 201);
  REQUIRE(c.Post("/sessions/same/run")->status == 200);
  CHECK(c.Get("/sessions/same/export.json")->body == support::slurp(dir / "cli.json"));
  CHECK(c.Get("/sessions/same/export.csv")->body == support::slurp(dir / "cli.csv"));
}
