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

#include "autothink/reward.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "autothink/error.h"
#include "autothink/text.h"

namespace autothink {
namespace {

constexpr double kNumericRelTol = 1e-6;

bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsAlnum(char c) {
  return IsDigit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// digits, optionally '.' digits; or '.' digits.
std::optional<double> ParseUnsignedDecimal(std::string_view s) {
  s = text::Trim(s);
  if (s.empty()) return std::nullopt;
  size_t i = 0;
  size_t int_digits = 0;
  while (i < s.size() && IsDigit(s[i])) ++i, ++int_digits;
  size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && IsDigit(s[i])) ++i, ++frac_digits;
    if (frac_digits == 0) return std::nullopt;
  }
  if (i != s.size() || (int_digits == 0 && frac_digits == 0)) {
    return std::nullopt;
  }
  return std::strtod(std::string(s).c_str(), nullptr);
}

std::optional<double> Divide(std::optional<double> p, std::optional<double> q) {
  if (!p || !q || *q == 0.0) return std::nullopt;
  return *p / *q;
}

}  // namespace

std::string_view TaskKindName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kQa:
      return "qa";
    case TaskKind::kGrounding:
      return "grounding";
    case TaskKind::kGroundingQa:
      return "grounding_qa";
  }
  return "unknown";
}

std::optional<TaskKind> ParseTaskKind(std::string_view name) {
  if (name == "qa") return TaskKind::kQa;
  if (name == "grounding") return TaskKind::kGrounding;
  if (name == "grounding_qa") return TaskKind::kGroundingQa;
  return std::nullopt;
}

std::string_view AnswerKindName(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::kMcq:
      return "mcq";
    case AnswerKind::kText:
      return "text";
    case AnswerKind::kNumeric:
      return "numeric";
  }
  return "unknown";
}

std::optional<AnswerKind> ParseAnswerKind(std::string_view name) {
  if (name == "mcq") return AnswerKind::kMcq;
  if (name == "text") return AnswerKind::kText;
  if (name == "numeric") return AnswerKind::kNumeric;
  return std::nullopt;
}

void ValidateGroundTruth(const GroundTruth& truth) {
  auto check_qa = [](const QaTruth& qa) {
    if (text::Trim(qa.answer).empty()) {
      throw Error(ErrorCode::kInvalidGroundTruth, "empty QA answer");
    }
  };
  auto check_segments = [](const std::vector<Segment>& segments) {
    if (segments.empty()) {
      throw Error(ErrorCode::kInvalidGroundTruth, "no ground-truth segments");
    }
    for (const Segment& s : segments) {
      if (!s.valid()) {
        throw Error(ErrorCode::kInvalidGroundTruth,
                    "segment must satisfy 0 <= start < end");
      }
    }
  };
  if (const auto* qa = std::get_if<QaTruth>(&truth)) {
    check_qa(*qa);
  } else if (const auto* g = std::get_if<GroundingTruth>(&truth)) {
    check_segments(g->segments);
  } else {
    const auto& gqa = std::get<GroundingQaTruth>(truth);
    check_qa(gqa.qa);
    check_segments(gqa.segments);
  }
}

double RewardBreakdown::TaskAndFallback(const RewardConfig& cfg) const {
  return cfg.w1 * r_task_first + cfg.w2 * r_task_second +
         cfg.alpha * r_fallback;
}

double WeightedTotal(const RewardBreakdown& parts, const RewardConfig& cfg) {
  return cfg.w1 * parts.r_task_first + cfg.w2 * parts.r_task_second +
         cfg.lambda_fmt * parts.r_fmt + cfg.alpha * parts.r_fallback;
}

std::optional<char> ExtractOptionLetter(std::string_view answer) {
  for (size_t i = 0; i < answer.size(); ++i) {
    const char upper = answer[i] >= 'a' && answer[i] <= 'z'
                           ? static_cast<char>(answer[i] - 'a' + 'A')
                           : answer[i];
    if (upper < 'A' || upper > 'E') continue;
    if (i > 0 && (IsAlnum(answer[i - 1]) || answer[i - 1] == '\'')) continue;
    const bool at_end = i + 1 == answer.size();
    const char next = at_end ? '\0' : answer[i + 1];
    const bool decorated = next == ')' || next == '.' || next == ':';
    if (!at_end && (IsAlnum(next) || next == '\'')) continue;
    // A bare lower-case letter followed by a space is usually the article
    // "a", not an option.
    const bool lower = answer[i] != upper;
    if (lower && !at_end && !decorated) continue;
    return upper;
  }
  return std::nullopt;
}

std::optional<double> ParseNumeric(std::string_view s) {
  s = text::Trim(s);
  while (!s.empty() && s.front() == '$') s.remove_prefix(1);
  while (!s.empty() && s.back() == '$') s.remove_suffix(1);
  s = text::Trim(s);
  double sign = 1.0;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    if (s.front() == '-') sign = -1.0;
    s = text::Trim(s.substr(1));
  }
  if (s.empty()) return std::nullopt;

  constexpr std::string_view kFrac = "\\frac{";
  if (s.substr(0, kFrac.size()) == kFrac) {
    const size_t mid = s.find("}{", kFrac.size());
    if (mid == std::string_view::npos || s.back() != '}') return std::nullopt;
    const auto p = ParseUnsignedDecimal(s.substr(kFrac.size(), mid - kFrac.size()));
    const auto q = ParseUnsignedDecimal(s.substr(mid + 2, s.size() - mid - 3));
    auto v = Divide(p, q);
    if (!v) return std::nullopt;
    return sign * *v;
  }
  if (const size_t slash = s.find('/'); slash != std::string_view::npos) {
    auto v = Divide(ParseUnsignedDecimal(s.substr(0, slash)),
                    ParseUnsignedDecimal(s.substr(slash + 1)));
    if (!v) return std::nullopt;
    return sign * *v;
  }
  auto v = ParseUnsignedDecimal(s);
  if (!v) return std::nullopt;
  return sign * *v;
}

bool NumericEquivalent(std::string_view a, std::string_view b) {
  const auto x = ParseNumeric(a);
  const auto y = ParseNumeric(b);
  if (x && y) {
    const double scale = std::max(std::fabs(*x), std::fabs(*y));
    return std::fabs(*x - *y) <= kNumericRelTol * scale;
  }
  return text::NormalizeAnswerText(a) == text::NormalizeAnswerText(b);
}

int QaReward(std::string_view answer, const QaTruth& truth,
             std::string_view fallback) {
  if (IsFallbackText(answer, fallback)) return 0;
  switch (truth.kind) {
    case AnswerKind::kMcq: {
      const auto want = ExtractOptionLetter(truth.answer);
      if (want) return ExtractOptionLetter(answer) == want ? 1 : 0;
      break;
    }
    case AnswerKind::kNumeric:
      return NumericEquivalent(answer, truth.answer) ? 1 : 0;
    case AnswerKind::kText:
      break;
  }
  return text::NormalizeAnswerText(answer) ==
                 text::NormalizeAnswerText(truth.answer)
             ? 1
             : 0;
}

double GroundingReward(std::string_view answer_text,
                       const std::vector<Segment>& truth_segments) {
  if (truth_segments.empty()) {
    throw Error(ErrorCode::kInvalidGroundTruth, "no ground-truth segments");
  }
  const SegmentParse parse = ParseSegments(answer_text);
  return BestPairTiou(parse.segments, truth_segments);
}

GroundingQaParts ScoreGroundingQa(std::string_view answer_text,
                                  const GroundingQaTruth& truth,
                                  std::string_view fallback) {
  const SegmentParse parse = ParseSegments(answer_text);
  std::string remainder;
  size_t pos = 0;
  for (const Interval& cut : parse.consumed) {
    remainder.append(answer_text.substr(pos, cut.begin - pos));
    remainder.push_back(' ');
    pos = cut.end;
  }
  remainder.append(answer_text.substr(std::min(pos, answer_text.size())));

  GroundingQaParts parts;
  parts.qa = QaReward(remainder, truth.qa, fallback);
  if (truth.segments.empty()) {
    throw Error(ErrorCode::kInvalidGroundTruth, "no ground-truth segments");
  }
  parts.grounding = BestPairTiou(parse.segments, truth.segments);
  return parts;
}

double GroundingQaReward(std::string_view answer_text,
                         const GroundingQaTruth& truth,
                         std::string_view fallback) {
  return ScoreGroundingQa(answer_text, truth, fallback).sum();
}

double TaskReward(std::string_view answer, const GroundTruth& truth,
                  std::string_view fallback) {
  if (IsFallbackText(answer, fallback)) return 0.0;
  if (const auto* qa = std::get_if<QaTruth>(&truth)) {
    return QaReward(answer, *qa, fallback);
  }
  if (const auto* g = std::get_if<GroundingTruth>(&truth)) {
    return GroundingReward(answer, g->segments);
  }
  return GroundingQaReward(answer, std::get<GroundingQaTruth>(truth), fallback);
}

bool AnswerCorrectForBonus(std::string_view answer, const GroundTruth& truth,
                           std::string_view fallback) {
  if (IsFallbackText(answer, fallback)) return false;
  if (const auto* qa = std::get_if<QaTruth>(&truth)) {
    return QaReward(answer, *qa, fallback) == 1;
  }
  if (const auto* g = std::get_if<GroundingTruth>(&truth)) {
    return GroundingReward(answer, g->segments) >= kBonusTiouThreshold;
  }
  const GroundingQaParts parts =
      ScoreGroundingQa(answer, std::get<GroundingQaTruth>(truth), fallback);
  return parts.qa >= kBonusTiouThreshold &&
         parts.grounding >= kBonusTiouThreshold;
}

RewardBreakdown CombineDualReward(const ParsedResponse& parsed,
                                  const GroundTruth& truth,
                                  const RewardConfig& cfg) {
  RewardBreakdown out;
  const bool first_is_fallback =
      parsed.first_answer && IsFallbackText(parsed.first_answer->text,
                                            cfg.fallback);
  if (parsed.first_answer && !first_is_fallback) {
    out.r_task_first = TaskReward(parsed.first_answer->text, truth, cfg.fallback);
  }
  if (parsed.second_answer) {
    out.r_task_second =
        TaskReward(parsed.second_answer->text, truth, cfg.fallback);
  }
  out.r_fmt = CheckFormat(parsed);
  // Paid regardless of format validity.
  out.r_fallback = first_is_fallback && parsed.second_answer &&
                           AnswerCorrectForBonus(parsed.second_answer->text,
                                                 truth, cfg.fallback)
                       ? 1
                       : 0;
  out.total = WeightedTotal(out, cfg);
  return out;
}

RewardBreakdown ScoreResponse(const ParsedResponse& parsed,
                              const GroundTruth& truth,
                              const RewardConfig& cfg) {
  if (parsed.kind == TemplateKind::kDualAnswer) {
    return CombineDualReward(parsed, truth, cfg);
  }
  RewardBreakdown out;
  if (parsed.first_answer) {
    out.r_task_first = TaskReward(parsed.first_answer->text, truth, cfg.fallback);
  }
  out.r_fmt = CheckFormat(parsed);
  out.total = out.r_task_first + cfg.lambda_fmt * out.r_fmt;
  return out;
}

}  // namespace autothink
