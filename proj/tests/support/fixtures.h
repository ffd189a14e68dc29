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

#ifndef AUTOTHINK_TESTS_SUPPORT_FIXTURES_H_
#define AUTOTHINK_TESTS_SUPPORT_FIXTURES_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "autothink/grammar.h"
#include "autothink/router.h"

// Deterministic fixture generators and brute-force oracles shared by the unit
// and acceptance tests. The oracles use only the standard library so they do
// not inherit bugs from the code under test.
namespace autothink::testing {

inline double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline size_t Pick(std::mt19937_64& rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

// ---------------------------------------------------------------------------
// Router traces.

struct TraceCase {
  std::string id;
  std::string category;
  std::vector<TokenEvent> tokens;
  bool correct_first = false;
  bool correct_second = false;
};

namespace internal {

inline void Push(std::vector<TokenEvent>& out, std::string text, double lp) {
  out.push_back({std::move(text), lp});
}

// Splits `s` into 1-3 character pieces.
inline std::vector<std::string> Shred(std::string_view s,
                                      std::mt19937_64& rng) {
  std::vector<std::string> pieces;
  size_t i = 0;
  while (i < s.size()) {
    const size_t n = std::min(s.size() - i, 1 + Pick(rng, 3));
    pieces.emplace_back(s.substr(i, n));
    i += n;
  }
  return pieces;
}

inline void PushOpener(std::vector<TokenEvent>& out, std::mt19937_64& rng) {
  if (Pick(rng, 2) == 0) {
    Push(out, "\\boxed{", Uniform(rng, -0.2, 0.0));
  } else {
    Push(out, "\\box", Uniform(rng, -0.2, 0.0));
    Push(out, "ed{", Uniform(rng, -0.2, 0.0));
  }
}

inline void PushThinkAndSecond(std::vector<TokenEvent>& out,
                               std::mt19937_64& rng) {
  if (Pick(rng, 2) == 0) {
    Push(out, "<think>", Uniform(rng, -1.0, 0.0));
  } else {
    Push(out, "<th", Uniform(rng, -1.0, 0.0));
    Push(out, "ink>", Uniform(rng, -1.0, 0.0));
  }
  for (const char* w : {"Looking", " at", " the", " clip", " again."}) {
    Push(out, w, Uniform(rng, -3.0, 0.0));
  }
  Push(out, "</think>", Uniform(rng, -0.5, 0.0));
  if (Pick(rng, 4) != 0) {
    PushOpener(out, rng);
    Push(out, std::string(1, static_cast<char>('A' + Pick(rng, 5))),
         Uniform(rng, -2.0, 0.0));
    Push(out, "}", Uniform(rng, -0.2, 0.0));
  }
}

}  // namespace internal

// Mixed fixture of confident, uncertain, fallback, malformed, threshold-edge
// and token-straddling traces. Correctness labels lean toward a1 being right
// when it is confident and a2 being right otherwise.
inline std::vector<TraceCase> RouterFixture(uint64_t seed, size_t n) {
  using internal::Push;
  std::mt19937_64 rng(seed);
  const double taus[] = {0.86, 0.90, 0.94, 0.97, 0.98};
  std::vector<TraceCase> cases;
  cases.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    TraceCase c;
    c.id = "trace-" + std::to_string(i);
    auto& t = c.tokens;
    if (Pick(rng, 3) == 0) Push(t, " ", -0.01);
    const size_t category = i % 6;
    bool finish_normally = true;
    double confidence = 0.0;
    switch (category) {
      case 0: {  // confident
        c.category = "confident";
        internal::PushOpener(t, rng);
        const size_t len = 1 + Pick(rng, 3);
        for (size_t k = 0; k < len; ++k) {
          const double lp = Uniform(rng, -0.012, 0.0);
          confidence += lp;
          Push(t, std::string(1, static_cast<char>('A' + Pick(rng, 5))), lp);
        }
        confidence /= static_cast<double>(len);
        Push(t, "}", -0.05);
        break;
      }
      case 1: {  // uncertain
        c.category = "uncertain";
        internal::PushOpener(t, rng);
        for (const char* w : {"the", " red", " car"}) {
          const double lp = Uniform(rng, -0.6, -0.02);
          confidence += lp;
          Push(t, w, lp);
        }
        confidence /= 3.0;
        Push(t, "}", -0.05);
        break;
      }
      case 2: {  // fallback, always highly probable
        c.category = "fallback";
        internal::PushOpener(t, rng);
        std::string phrase(kDefaultFallback);
        switch (Pick(rng, 3)) {
          case 0:
            break;
          case 1:
            phrase = "let's analyze the problem step by step";
            break;
          default:
            phrase = "  Let's   analyze the problem step by step. ";
        }
        for (const auto& piece : internal::Shred(phrase, rng)) {
          Push(t, piece, Uniform(rng, -0.001, 0.0));
        }
        Push(t, "}", -0.001);
        confidence = -1e300;
        break;
      }
      case 3: {  // malformed prefix
        c.category = "malformed";
        switch (Pick(rng, 5)) {
          case 0:  // think before any box
            Push(t, "<think>", -0.1);
            Push(t, "hmm", -0.5);
            Push(t, "</think>", -0.1);
            internal::PushOpener(t, rng);
            Push(t, "B", -0.001);
            Push(t, "}", -0.01);
            finish_normally = false;
            break;
          case 1:  // empty first box
            internal::PushOpener(t, rng);
            Push(t, "}", -0.001);
            break;
          case 2:  // no box at all
            Push(t, "The answer is B.", -0.01);
            finish_normally = false;
            break;
          case 3:  // first box never closes
            internal::PushOpener(t, rng);
            Push(t, "B", -0.001);
            Push(t, "<think>", -0.1);
            Push(t, "still thinking", -0.5);
            finish_normally = false;
            break;
          default:  // think tag split around a box opener
            Push(t, "<thi", -0.1);
            Push(t, "nk>", -0.1);
            internal::PushOpener(t, rng);
            Push(t, "C", -0.001);
            Push(t, "}", -0.01);
            finish_normally = false;
        }
        confidence = -1e300;
        break;
      }
      case 4: {  // exactly at, or one ulp around, ln(tau)
        c.category = "threshold_edge";
        internal::PushOpener(t, rng);
        const double tau = taus[Pick(rng, 5)];
        double lp = std::log(tau);
        const size_t nudge = Pick(rng, 3);
        if (nudge == 1) lp = std::nextafter(lp, 0.0);
        if (nudge == 2) lp = std::nextafter(lp, -1.0);
        Push(t, "D", lp);
        Push(t, "}", -0.3);
        confidence = lp;
        break;
      }
      default: {  // tokens straddling the box boundaries
        c.category = "straddle";
        Push(t, "\\boxed", -0.01);
        const double a = Uniform(rng, -0.08, 0.0);
        const double b = Uniform(rng, -0.08, 0.0);
        Push(t, "{B", a);
        Push(t, "C}<", b);
        Push(t, "think>", -0.2);
        for (const char* w : {"ok", "</think>", "\\boxed{C}"}) Push(t, w, -0.4);
        confidence = (a + b) / 2.0;
        finish_normally = false;
      }
    }
    if (finish_normally && Pick(rng, 5) != 0) {
      internal::PushThinkAndSecond(t, rng);
    }
    const bool confident = confidence >= std::log(0.95);
    c.correct_first = confident ? Pick(rng, 10) != 0 : Pick(rng, 3) == 0;
    c.correct_second = Pick(rng, 10) < 8;
    cases.push_back(std::move(c));
  }
  return cases;
}

// Independent reimplementation of the routing rule on a complete trace: find
// the first "\boxed{", brace-match it, reject a <think> before the opener,
// average the log-probs of every token overlapping the contents and exit iff
// the mean is >= ln(tau). The fallback phrase never exits.
struct OracleDecision {
  bool early_exit = false;
  std::optional<double> score;  // nullopt when unscored
  bool fallback = false;
};

inline std::string OracleNormalize(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' ||
        ch == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a')
                                         : ch);
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

inline OracleDecision BruteForceRoute(const std::vector<TokenEvent>& tokens,
                                      double tau,
                                      std::string_view fallback =
                                          kDefaultFallback) {
  std::string text;
  std::vector<std::pair<size_t, size_t>> spans;
  for (const auto& tok : tokens) {
    spans.emplace_back(text.size(), text.size() + tok.text.size());
    text += tok.text;
  }
  OracleDecision d;
  const std::string opener = "\\boxed{";
  const size_t open = text.find(opener);
  if (open == std::string::npos) return d;
  const size_t think = text.find("<think>");
  if (think != std::string::npos && think < open) return d;
  const size_t begin = open + opener.size();
  int depth = 1;
  size_t end = std::string::npos;
  for (size_t i = begin; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}' && --depth == 0) {
      end = i;
      break;
    }
  }
  if (end == std::string::npos || end == begin) return d;
  if (OracleNormalize(text.substr(begin, end - begin)) ==
      OracleNormalize(fallback)) {
    d.fallback = true;
    d.score = kFallbackSentinel;
    return d;
  }
  double sum = 0.0;
  size_t count = 0;
  for (size_t k = 0; k < tokens.size(); ++k) {
    if (std::max(spans[k].first, begin) < std::min(spans[k].second, end)) {
      sum += tokens[k].logprob;
      ++count;
    }
  }
  d.score = sum / static_cast<double>(count);
  d.early_exit = *d.score >= std::log(tau);
  return d;
}

// ---------------------------------------------------------------------------
// Render/parse round trips and format mutations.

struct RenderCase {
  std::string first;
  std::string think;
  std::string second;
  TemplateKind kind = TemplateKind::kDualAnswer;
};

inline std::string RandomAnswer(std::mt19937_64& rng, bool allow_empty) {
  static const char* kPool[] = {
      "A",          "B",           "c",        "b) the red car",
      "\\frac{1}{2}", "-3.25",     "42",       "{x}{y}",
      "a {nested {pair}}", "two  spaces", " padded ", "Let's analyze the problem step by step.",
      "[[8.0, 10.5]]", "from 3 to 7 seconds", "x^{2}+1", "\\sqrt{2}"};
  const size_t n = sizeof(kPool) / sizeof(kPool[0]);
  if (allow_empty && Pick(rng, 12) == 0) return "";
  return kPool[Pick(rng, n)];
}

inline std::string RandomThink(std::mt19937_64& rng) {
  static const char* kWords[] = {"the", "clip", "shows", "a", "car,",
                                 "then", "x < y", "and", "y > z.", "\n",
                                 "so", "(b)", "is", "{right}", "done"};
  const size_t n = sizeof(kWords) / sizeof(kWords[0]);
  std::string out;
  const size_t len = Pick(rng, 12);
  for (size_t i = 0; i < len; ++i) {
    if (!out.empty()) out += ' ';
    out += kWords[Pick(rng, n)];
  }
  return out;
}

inline RenderCase RandomRenderCase(std::mt19937_64& rng) {
  RenderCase c;
  c.kind = static_cast<TemplateKind>(Pick(rng, 3));
  c.first = RandomAnswer(rng, c.kind == TemplateKind::kDualAnswer);
  c.think = RandomThink(rng);
  c.second = RandomAnswer(rng, false);
  return c;
}

// Corrupts a well-formed rendering of `kind` so that it no longer matches the
// template. `which` selects the corruption; every choice breaks the grammar.
inline std::string Mutate(std::string s, TemplateKind kind, size_t which) {
  const std::string think_block_open(kThinkOpen);
  const std::string think_block_close(kThinkClose);
  auto replace_first = [&](const std::string& from, const std::string& to) {
    const size_t at = s.find(from);
    if (at != std::string::npos) s.replace(at, from.size(), to);
  };
  const bool has_think = kind != TemplateKind::kDirectAnswer;
  switch (has_think ? which % 10 : which % 6) {
    case 0:  // drop the closing brace of the last box
      s.pop_back();
      return s;
    case 1:
      return s + " and that is final";
    case 2:
      return "Answer: " + s;
    case 3:
      return s + "\\boxed{C}";
    case 4:
      replace_first("\\boxed{", "\\boxd{");
      return s;
    case 5:
      if (!has_think) return "<think>r</think>" + s;
      replace_first(think_block_close,
                    think_block_close + "<think>again</think>");
      return s;
    case 6:
      replace_first(think_block_close, "");
      return s;
    case 7:
      replace_first(think_block_open, "");
      return s;
    case 8:
      replace_first(think_block_open, think_block_open + "<think>");
      return s;
    default: {
      // Move the think block to the other side of its neighbouring box.
      const size_t open = s.find(think_block_open);
      const size_t close = s.find(think_block_close) + think_block_close.size();
      const std::string block = s.substr(open, close - open);
      s.erase(open, close - open);
      return kind == TemplateKind::kDualAnswer ? block + s : s + block;
    }
  }
}

}  // namespace autothink::testing

#endif  // AUTOTHINK_TESTS_SUPPORT_FIXTURES_H_
