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

#ifndef AUTOTHINK_GRAMMAR_H_
#define AUTOTHINK_GRAMMAR_H_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace autothink {

// The phrase a model writes in its first box when it wants to defer to
// reasoning instead of guessing.
inline constexpr std::string_view kDefaultFallback =
    "Let's analyze the problem step by step.";

inline constexpr std::string_view kBoxOpen = "\\boxed{";
inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";

enum class TemplateKind {
  kDualAnswer,       // \boxed{a1}<think>r</think>\boxed{a2}
  kThinkThenAnswer,  // <think>r</think>\boxed{a}
  kDirectAnswer,     // \boxed{a}
};

std::string_view TemplateName(TemplateKind kind);
// Accepts "dual_answer", "think_then_answer", "direct_answer".
std::optional<TemplateKind> ParseTemplateName(std::string_view name);

// Half-open interval [begin, end).
struct Interval {
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool Intersects(const Interval& other) const {
    return std::max(begin, other.begin) < std::min(end, other.end);
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct AnswerSpan {
  std::string text;  // brace contents, verbatim
  Interval char_span;
  std::optional<Interval> token_span;
  bool is_fallback = false;
};

// A model response decomposed against one template. For the single-answer
// templates the only answer lives in `first_answer` and `second_answer` is
// always empty.
struct ParsedResponse {
  TemplateKind kind = TemplateKind::kDualAnswer;
  std::optional<AnswerSpan> first_answer;
  std::optional<std::string> think_text;
  std::optional<AnswerSpan> second_answer;
  bool format_ok = false;
  std::string raw;

  // The answer a user would read: a2 for DualAnswer, the sole box otherwise.
  const std::optional<AnswerSpan>& final_answer() const {
    return kind == TemplateKind::kDualAnswer ? second_answer : first_answer;
  }
};

// One balanced `\boxed{...}` occurrence. `outer` covers the opener through the
// closing brace; `inner` covers only the contents.
struct BoxedBlock {
  Interval outer;
  Interval inner;
};

// Scans left to right for `\boxed{` and matches braces by depth. Blocks never
// nest in the output: scanning resumes after each closing brace. An opener
// without a matching close ends the scan and is reported via `unterminated`.
struct BoxScan {
  std::vector<BoxedBlock> blocks;
  std::optional<size_t> unterminated;  // offset of a dangling opener
};
BoxScan ScanBoxes(std::string_view raw, size_t from = 0);

// Offset of the first balanced box, if the prefix already closes one.
std::optional<BoxedBlock> FirstBox(std::string_view raw);

ParsedResponse ParseResponse(std::string_view raw, TemplateKind kind,
                             std::string_view fallback = kDefaultFallback);

// R_fmt: 1 iff the response matched its template exactly.
int CheckFormat(const ParsedResponse& parsed);

bool DetectFallback(const AnswerSpan& span,
                    std::string_view fallback = kDefaultFallback);
bool IsFallbackText(std::string_view text,
                    std::string_view fallback = kDefaultFallback);

// Token indices [begin, end) of every token whose character interval overlaps
// the first answer's contents. Throws Error(kEmptyAnswer) when no token
// overlaps, including the empty-box and missing-answer cases.
Interval ExtractAnswerTokenSpan(const ParsedResponse& parsed,
                                std::span<const Interval> token_offsets);
Interval TokenSpanForChars(const Interval& chars,
                           std::span<const Interval> token_offsets);

// Inverse of ParseResponse for well-formed components. `second` is ignored by
// the single-answer templates, `think` by DirectAnswer. Throws
// Error(kUnrenderableComponent) when a component would break the grammar.
std::string RenderTemplate(std::string_view first, std::string_view think,
                           std::string_view second, TemplateKind kind);

}  // namespace autothink

#endif  // AUTOTHINK_GRAMMAR_H_
