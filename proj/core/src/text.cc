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

#include "autothink/text.h"

#include "autothink/error.h"

namespace autothink {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyAnswer:
      return "empty_answer";
    case ErrorCode::kUnrenderableComponent:
      return "unrenderable_component";
    case ErrorCode::kGroupTooSmall:
      return "group_too_small";
    case ErrorCode::kGroupSizeMismatch:
      return "group_size_mismatch";
    case ErrorCode::kDimensionMismatch:
      return "dimension_mismatch";
    case ErrorCode::kInvalidThreshold:
      return "invalid_threshold";
    case ErrorCode::kProtocolViolation:
      return "protocol_violation";
    case ErrorCode::kEmptyCorpus:
      return "empty_corpus";
    case ErrorCode::kIdMismatch:
      return "id_mismatch";
    case ErrorCode::kInvalidConfig:
      return "invalid_config";
    case ErrorCode::kInvalidGroundTruth:
      return "invalid_ground_truth";
    case ErrorCode::kSchemaError:
      return "schema_error";
  }
  return "unknown";
}

namespace text {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsPunct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

char ToLower(char c) { return (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c; }

std::string_view Trim(std::string_view s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && IsSpace(s[begin])) ++begin;
  while (end > begin && IsSpace(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

std::string CollapseAndFold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : Trim(s)) {
    if (IsSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ToLower(c));
  }
  return out;
}

std::string NormalizeFallback(std::string_view s) {
  std::string out = CollapseAndFold(s);
  if (!out.empty() && out.back() == '.') {
    out.pop_back();
    while (!out.empty() && out.back() == ' ') out.pop_back();
  }
  return out;
}

std::string NormalizeAnswerText(std::string_view s) {
  std::string folded = CollapseAndFold(s);
  std::string_view view = folded;
  while (!view.empty() && (IsPunct(view.front()) || IsSpace(view.front()))) {
    view.remove_prefix(1);
  }
  while (!view.empty() && (IsPunct(view.back()) || IsSpace(view.back()))) {
    view.remove_suffix(1);
  }
  return std::string(view);
}

}  // namespace text
}  // namespace autothink
