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

#include "valclust/error.hpp"

namespace valclust {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kEncodingError: return "encoding_error";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kMissingColumn: return "missing_column";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kStageOrder: return "stage_order";
    case ErrorCode::kResultMissing: return "result_missing";
    case ErrorCode::kFingerprintMismatch: return "fingerprint_mismatch";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kResourceExhausted: return "resource_exhausted";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kLocked: return "locked";
    case ErrorCode::kAlreadyExists: return "already_exists";
  }
  return "internal";
}

}  // namespace valclust
