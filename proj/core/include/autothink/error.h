// Copyright 2026 The autothink Authors. All Rights Reserved.
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

#ifndef AUTOTHINK_ERROR_H_
#define AUTOTHINK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace autothink {

enum class ErrorCode {
  kEmptyAnswer,
  kUnrenderableComponent,
  kGroupTooSmall,
  kGroupSizeMismatch,
  kDimensionMismatch,
  kInvalidThreshold,
  kProtocolViolation,
  kEmptyCorpus,
  kIdMismatch,
  kInvalidConfig,
  kInvalidGroundTruth,
  kSchemaError,
};

// Stable snake_case name used in machine-readable error lines.
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace autothink

#endif  // AUTOTHINK_ERROR_H_
