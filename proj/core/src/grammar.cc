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

#include "autothink/grammar.h"

#include <string>

#include "autothink/error.h"
#include "autothink/text.h"

namespace autothink {
namespace {

size_t CountOccurrences(std::string_view haystack, std::string_view needle) {
  size_t count = 0;
  for (size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

size_t SkipSpace(std::string_view s, size_t pos) {
  while (pos < s.size() && text::IsSpace(s[pos])) ++pos;
  return pos;
}

bool BracesBalanced(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '{') ++depth;
    if (c == '}' && --depth < 0) return false;
  }
  return depth == 0;
}

AnswerSpan MakeSpan(std::string_view raw, const BoxedBlock& block,
                    std::string_view fallback) {
  AnswerSpan span;
  span.text = std::string(raw.substr(block.inner.begin, block.inner.size()));
  span.char_span = block.inner;
  span.is_fallback = IsFallbackText(span.text, fallback);
  return span;
}

struct Expected {
  size_t boxes;
  size_t thinks;
};

Expected ExpectedCounts(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kDualAnswer:
      return {2, 1};
    case TemplateKind::kThinkThenAnswer:
      return {1, 1};
    case TemplateKind::kDirectAnswer:
      return {1, 0};
  }
  return {0, 0};
}

// Walks the template's block sequence allowing only whitespace between and
// around blocks. Block counts are checked separately.
bool MatchesSequence(std::string_view raw, TemplateKind kind,
                     const std::vector<BoxedBlock>& blocks) {
  enum class Item { kBox, kThink };
  std::vector<Item> sequence;
  switch (kind) {
    case TemplateKind::kDualAnswer:
      sequence = {Item::kBox, Item::kThink, Item::kBox};
      break;
    case TemplateKind::kThinkThenAnswer:
      sequence = {Item::kThink, Item::kBox};
      break;
    case TemplateKind::kDirectAnswer:
      sequence = {Item::kBox};
      break;
  }
  size_t pos = 0;
  size_t next_block = 0;
  for (Item item : sequence) {
    pos = SkipSpace(raw, pos);
    if (item == Item::kBox) {
      if (next_block >= blocks.size() ||
          blocks[next_block].outer.begin != pos) {
        return false;
      }
      pos = blocks[next_block++].outer.end;
    } else {
      if (raw.compare(pos, kThinkOpen.size(), kThinkOpen) != 0) return false;
      size_t close = raw.find(kThinkClose, pos + kThinkOpen.size());
      if (close == std::string_view::npos) return false;
      pos = close + kThinkClose.size();
      while (next_block < blocks.size() && blocks[next_block].outer.begin < pos)
        ++next_block;
    }
  }
  return SkipSpace(raw, pos) == raw.size();
}

}  // namespace

std::string_view TemplateName(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kDualAnswer:
      return "dual_answer";
    case TemplateKind::kThinkThenAnswer:
      return "think_then_answer";
    case TemplateKind::kDirectAnswer:
      return "direct_answer";
  }
  return "unknown";
}

std::optional<TemplateKind> ParseTemplateName(std::string_view name) {
  if (name == "dual_answer") return TemplateKind::kDualAnswer;
  if (name == "think_then_answer") return TemplateKind::kThinkThenAnswer;
  if (name == "direct_answer") return TemplateKind::kDirectAnswer;
  return std::nullopt;
}

BoxScan ScanBoxes(std::string_view raw, size_t from) {
  BoxScan scan;
  size_t pos = raw.find(kBoxOpen, from);
  while (pos != std::string_view::npos) {
    const size_t content_begin = pos + kBoxOpen.size();
    int depth = 1;
    size_t i = content_begin;
    for (; i < raw.size(); ++i) {
      if (raw[i] == '{') {
        ++depth;
      } else if (raw[i] == '}' && --depth == 0) {
        break;
      }
    }
    if (depth != 0) {
      scan.unterminated = pos;
      break;
    }
    scan.blocks.push_back({{pos, i + 1}, {content_begin, i}});
    pos = raw.find(kBoxOpen, i + 1);
  }
  return scan;
}

std::optional<BoxedBlock> FirstBox(std::string_view raw) {
  BoxScan scan = ScanBoxes(raw);
  if (scan.blocks.empty()) return std::nullopt;
  // A dangling opener before the first complete block cannot happen: the scan
  // stops at the first unterminated opener.
  return scan.blocks.front();
}

ParsedResponse ParseResponse(std::string_view raw, TemplateKind kind,
                             std::string_view fallback) {
  ParsedResponse parsed;
  parsed.kind = kind;
  parsed.raw = std::string(raw);

  const BoxScan scan = ScanBoxes(raw);
  const auto& blocks = scan.blocks;

  if (!blocks.empty()) {
    if (kind == TemplateKind::kDualAnswer) {
      parsed.first_answer = MakeSpan(raw, blocks.front(), fallback);
      if (blocks.size() >= 2) {
        parsed.second_answer = MakeSpan(raw, blocks.back(), fallback);
      }
    } else {
      parsed.first_answer = MakeSpan(raw, blocks.back(), fallback);
    }
  }

  const size_t think_open = raw.find(kThinkOpen);
  if (think_open != std::string_view::npos) {
    const size_t body = think_open + kThinkOpen.size();
    const size_t think_close = raw.find(kThinkClose, body);
    if (think_close != std::string_view::npos) {
      parsed.think_text = std::string(raw.substr(body, think_close - body));
    }
  }

  const Expected expected = ExpectedCounts(kind);
  parsed.format_ok = !scan.unterminated &&
                     blocks.size() == expected.boxes &&
                     CountOccurrences(raw, kThinkOpen) == expected.thinks &&
                     CountOccurrences(raw, kThinkClose) == expected.thinks &&
                     MatchesSequence(raw, kind, blocks);
  return parsed;
}

int CheckFormat(const ParsedResponse& parsed) {
  return parsed.format_ok ? 1 : 0;
}

bool IsFallbackText(std::string_view text, std::string_view fallback) {
  return text::NormalizeFallback(text) == text::NormalizeFallback(fallback);
}

bool DetectFallback(const AnswerSpan& span, std::string_view fallback) {
  return IsFallbackText(span.text, fallback);
}

Interval TokenSpanForChars(const Interval& chars,
                           std::span<const Interval> token_offsets) {
  std::optional<size_t> first;
  size_t last = 0;
  for (size_t i = 0; i < token_offsets.size(); ++i) {
    if (token_offsets[i].Intersects(chars)) {
      if (!first) first = i;
      last = i;
    } else if (first) {
      break;
    }
  }
  if (!first) {
    throw Error(ErrorCode::kEmptyAnswer,
                "no token overlaps the first answer span");
  }
  return {*first, last + 1};
}

Interval ExtractAnswerTokenSpan(const ParsedResponse& parsed,
                                std::span<const Interval> token_offsets) {
  if (!parsed.first_answer) {
    throw Error(ErrorCode::kEmptyAnswer, "response has no boxed answer");
  }
  return TokenSpanForChars(parsed.first_answer->char_span, token_offsets);
}

std::string RenderTemplate(std::string_view first, std::string_view think,
                           std::string_view second, TemplateKind kind) {
  auto check = [](std::string_view component, std::string_view role) {
    if (component.find(kThinkOpen) != std::string_view::npos ||
        component.find(kThinkClose) != std::string_view::npos ||
        component.find(kBoxOpen) != std::string_view::npos ||
        !BracesBalanced(component)) {
      throw Error(ErrorCode::kUnrenderableComponent,
                  std::string(role) + " component would break the grammar");
    }
  };
  auto box = [](std::string_view answer) {
    std::string out(kBoxOpen);
    out.append(answer);
    out.push_back('}');
    return out;
  };
  auto think_block = [](std::string_view body) {
    std::string out(kThinkOpen);
    out.append(body);
    out.append(kThinkClose);
    return out;
  };

  switch (kind) {
    case TemplateKind::kDualAnswer:
      check(first, "first");
      check(think, "think");
      check(second, "second");
      return box(first) + think_block(think) + box(second);
    case TemplateKind::kThinkThenAnswer:
      check(think, "think");
      check(first, "answer");
      return think_block(think) + box(first);
    case TemplateKind::kDirectAnswer:
      check(first, "answer");
      return box(first);
  }
  return {};
}

}  // namespace autothink
