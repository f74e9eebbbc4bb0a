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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace valclust {

/// Closed set of failure categories shared by the library, the CLI and the
/// HTTP service. The string form is the `code` field of API error bodies.
enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kEncodingError,
  kParseError,
  kMissingColumn,
  kInvalidConfig,
  kStageOrder,
  kResultMissing,
  kFingerprintMismatch,
  kVersionMismatch,
  kResourceExhausted,
  kNotFound,
  kLocked,
  kAlreadyExists,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::string> stage = std::nullopt)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::string>& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::optional<std::string> stage_;
};

}  // namespace valclust
