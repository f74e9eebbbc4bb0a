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

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "valclust/error.hpp"

namespace valclust {

struct ServiceOptions {
  std::filesystem::path data_dir;
  unsigned threads = 1;  // distance-matrix workers per run
  std::string cors_origin = "*";
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

/// {"code", "message", "stage"?}
nlohmann::json error_body(const Error& e);

/// Local HTTP+JSON API over sessions persisted in `data_dir`, one
/// `<id>.json` file per session. Every successful mutation is written back
/// before the response is sent.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves until stop(); returns false if binding failed.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Serves on a socket bound by bind_any_port.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace valclust
