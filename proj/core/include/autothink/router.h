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

#ifndef AUTOTHINK_ROUTER_H_
#define AUTOTHINK_ROUTER_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autothink/grammar.h"

namespace autothink {

inline constexpr double kDefaultTau = 0.97;
// Serialized value of the fallback score. Comparisons treat it as -inf.
inline constexpr double kFallbackSentinel = -1e6;

struct TokenEvent {
  std::string text;
  double logprob = 0.0;
};

// Length-normalized confidence of the first answer.
struct Confidence {
  enum class Kind {
    kNumeric,
    kFallback,  // a1 is the fallback string
    kUnscored,  // no usable first box (empty or malformed prefix)
  };
  Kind kind = Kind::kUnscored;
  double value = 0.0;  // mean log-prob when kind == kNumeric

  static Confidence Numeric(double v) { return {Kind::kNumeric, v}; }
  static Confidence Fallback() { return {Kind::kFallback, kFallbackSentinel}; }
  static Confidence Unscored() { return {Kind::kUnscored, 0.0}; }

  bool numeric() const { return kind == Kind::kNumeric; }
  // Value written to decision files; nullopt for unscored.
  std::optional<double> serialized() const;
};

enum class RouteAction { kEarlyExit, kContinue };
std::string_view RouteActionName(RouteAction action);
std::optional<RouteAction> ParseRouteAction(std::string_view name);

struct ConfidenceDecision {
  Confidence score;
  double tau = kDefaultTau;
  RouteAction action = RouteAction::kContinue;
  // a1 on early exit; a2 once supplied after a Continue; empty while pending.
  std::optional<std::string> chosen_answer;
  // Set when `<think>` arrived before any complete first box or the box held
  // no tokens. Such decisions are always Continue.
  bool malformed_prefix = false;
};

// Mean log-prob of the tokens inside the first box. The fallback check runs
// on `answer_text` (the box contents). Throws Error(kEmptyAnswer) on an empty
// token list.
Confidence ScoreConfidence(std::span<const TokenEvent> answer_tokens,
                           std::string_view answer_text,
                           std::string_view fallback = kDefaultFallback);
// Convenience form that checks the concatenated token text for the fallback.
Confidence ScoreJoinedConfidence(std::span<const TokenEvent> answer_tokens,
                                 std::string_view fallback = kDefaultFallback);

// EarlyExit iff the score is numeric and score >= ln(tau). Throws
// Error(kInvalidThreshold) unless 0 < tau <= 1.
ConfidenceDecision Decide(const Confidence& score, double tau);

// Batch path: routes a complete recorded trace. The first box is located on
// the full text with the response grammar; a `<think>` tag before the box
// opener or a missing/empty box yields a flagged Continue.
ConfidenceDecision RouteTrace(std::span<const TokenEvent> trace, double tau,
                              std::string_view fallback = kDefaultFallback);

// Streaming path.
struct RouterState {
  enum class Phase { kAwaitingFirstBox, kAwaitingThinkTag, kDecided };
  Phase phase = Phase::kAwaitingFirstBox;
  std::vector<TokenEvent> buffered_events;
  std::optional<ConfidenceDecision> decision;

  // Concatenated text of buffered_events and each event's char interval.
  std::string text;
  std::vector<Interval> offsets;
};

std::string_view PhaseName(RouterState::Phase phase);

// Buffers one event. Emits a decision the first time the buffered text holds
// a complete `<think>` tag outside the first box. After EarlyExit the caller
// should stop generation; after Continue it resumes and later calls Finalize.
// Throws Error(kProtocolViolation) once the state is Decided.
std::optional<ConfidenceDecision> StreamStep(RouterState& state,
                                             const TokenEvent& event,
                                             double tau,
                                             std::string_view fallback =
                                                 kDefaultFallback);

// End of stream without a `<think>` tag: decide on whatever first box was
// seen (the box contents are all that matter). No-op once decided.
ConfidenceDecision FinishStream(RouterState& state, double tau,
                                std::string_view fallback = kDefaultFallback);

// Records a2 as the chosen answer of a Continue decision.
void Finalize(RouterState& state, std::string second_answer);

// Replays a recorded trace through StreamStep/FinishStream. After a Continue
// on a well-formed prefix, a2 is read from the full trace when present.
ConfidenceDecision RouteStream(std::span<const TokenEvent> trace, double tau,
                               std::string_view fallback = kDefaultFallback);

}  // namespace autothink

#endif  // AUTOTHINK_ROUTER_H_
