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

#include "autothink/router.h"

#include <cmath>

#include "autothink/error.h"

namespace autothink {
namespace {

ConfidenceDecision Malformed(double tau) {
  ConfidenceDecision d = Decide(Confidence::Unscored(), tau);
  d.malformed_prefix = true;
  return d;
}

// Scores the tokens overlapping `box.inner` and applies the threshold.
ConfidenceDecision DecideOnBox(std::string_view text,
                               std::span<const Interval> offsets,
                               std::span<const TokenEvent> events,
                               const Interval& inner, double tau,
                               std::string_view fallback) {
  if (inner.empty()) return Malformed(tau);
  const Interval span = TokenSpanForChars(inner, offsets);
  const std::string answer(text.substr(inner.begin, inner.size()));
  ConfidenceDecision d =
      Decide(ScoreConfidence(events.subspan(span.begin, span.size()), answer,
                             fallback),
             tau);
  if (d.action == RouteAction::kEarlyExit) d.chosen_answer = answer;
  return d;
}

// The first balanced box of `text`, or the offset of its dangling opener.
struct FirstBoxState {
  std::optional<BoxedBlock> box;
  std::optional<size_t> opener;
};

FirstBoxState LocateFirstBox(std::string_view text) {
  FirstBoxState state;
  const BoxScan scan = ScanBoxes(text);
  if (!scan.blocks.empty()) {
    state.box = scan.blocks.front();
    state.opener = scan.blocks.front().outer.begin;
  } else if (scan.unterminated) {
    state.opener = scan.unterminated;
  }
  return state;
}

void CheckTau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidThreshold,
                "tau must lie in (0, 1], got " + std::to_string(tau));
  }
}

}  // namespace

std::optional<double> Confidence::serialized() const {
  switch (kind) {
    case Kind::kNumeric:
      return value;
    case Kind::kFallback:
      return kFallbackSentinel;
    case Kind::kUnscored:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string_view RouteActionName(RouteAction action) {
  return action == RouteAction::kEarlyExit ? "early_exit" : "continue";
}

std::optional<RouteAction> ParseRouteAction(std::string_view name) {
  if (name == "early_exit") return RouteAction::kEarlyExit;
  if (name == "continue") return RouteAction::kContinue;
  return std::nullopt;
}

std::string_view PhaseName(RouterState::Phase phase) {
  switch (phase) {
    case RouterState::Phase::kAwaitingFirstBox:
      return "awaiting_first_box";
    case RouterState::Phase::kAwaitingThinkTag:
      return "awaiting_think_tag";
    case RouterState::Phase::kDecided:
      return "decided";
  }
  return "unknown";
}

Confidence ScoreConfidence(std::span<const TokenEvent> answer_tokens,
                           std::string_view answer_text,
                           std::string_view fallback) {
  if (answer_tokens.empty()) {
    throw Error(ErrorCode::kEmptyAnswer, "first answer has no tokens");
  }
  if (IsFallbackText(answer_text, fallback)) return Confidence::Fallback();
  double sum = 0.0;
  for (const TokenEvent& t : answer_tokens) sum += t.logprob;
  return Confidence::Numeric(sum / static_cast<double>(answer_tokens.size()));
}

Confidence ScoreJoinedConfidence(std::span<const TokenEvent> answer_tokens,
                                 std::string_view fallback) {
  std::string joined;
  for (const TokenEvent& t : answer_tokens) joined += t.text;
  return ScoreConfidence(answer_tokens, joined, fallback);
}

ConfidenceDecision Decide(const Confidence& score, double tau) {
  CheckTau(tau);
  ConfidenceDecision d;
  d.score = score;
  d.tau = tau;
  d.action = score.numeric() && score.value >= std::log(tau)
                 ? RouteAction::kEarlyExit
                 : RouteAction::kContinue;
  return d;
}

ConfidenceDecision RouteTrace(std::span<const TokenEvent> trace, double tau,
                              std::string_view fallback) {
  CheckTau(tau);
  std::string text;
  std::vector<Interval> offsets;
  offsets.reserve(trace.size());
  for (const TokenEvent& t : trace) {
    offsets.push_back({text.size(), text.size() + t.text.size()});
    text += t.text;
  }

  const ParsedResponse parsed =
      ParseResponse(text, TemplateKind::kDualAnswer, fallback);
  if (!parsed.first_answer) return Malformed(tau);
  const size_t opener = parsed.first_answer->char_span.begin - kBoxOpen.size();
  const size_t think = text.find(kThinkOpen);
  if (think != std::string::npos && think < opener) return Malformed(tau);

  ConfidenceDecision d = DecideOnBox(text, offsets, trace,
                                     parsed.first_answer->char_span, tau,
                                     fallback);
  if (d.action == RouteAction::kContinue && !d.malformed_prefix &&
      parsed.second_answer) {
    d.chosen_answer = parsed.second_answer->text;
  }
  return d;
}

std::optional<ConfidenceDecision> StreamStep(RouterState& state,
                                             const TokenEvent& event,
                                             double tau,
                                             std::string_view fallback) {
  if (state.phase == RouterState::Phase::kDecided) {
    throw Error(ErrorCode::kProtocolViolation,
                "stream_step called after a decision was emitted");
  }
  CheckTau(tau);
  state.offsets.push_back(
      {state.text.size(), state.text.size() + event.text.size()});
  state.text += event.text;
  state.buffered_events.push_back(event);

  const FirstBoxState first = LocateFirstBox(state.text);
  size_t think = std::string::npos;
  if (first.box) {
    state.phase = RouterState::Phase::kAwaitingThinkTag;
    think = state.text.find(kThinkOpen, first.box->outer.end);
  } else {
    const size_t limit = first.opener.value_or(state.text.size());
    think = std::string_view(state.text).substr(0, limit).find(kThinkOpen);
  }
  if (think == std::string::npos) return std::nullopt;

  state.decision = first.box ? DecideOnBox(state.text, state.offsets,
                                           state.buffered_events,
                                           first.box->inner, tau, fallback)
                             : Malformed(tau);
  state.phase = RouterState::Phase::kDecided;
  return state.decision;
}

ConfidenceDecision FinishStream(RouterState& state, double tau,
                                std::string_view fallback) {
  if (state.phase == RouterState::Phase::kDecided && state.decision) {
    return *state.decision;
  }
  const FirstBoxState first = LocateFirstBox(state.text);
  state.decision = first.box ? DecideOnBox(state.text, state.offsets,
                                           state.buffered_events,
                                           first.box->inner, tau, fallback)
                             : Malformed(tau);
  state.phase = RouterState::Phase::kDecided;
  return *state.decision;
}

void Finalize(RouterState& state, std::string second_answer) {
  if (!state.decision) {
    throw Error(ErrorCode::kProtocolViolation,
                "finalize called before a decision was emitted");
  }
  if (state.decision->action != RouteAction::kContinue) {
    throw Error(ErrorCode::kProtocolViolation,
                "finalize only applies to Continue decisions");
  }
  state.decision->chosen_answer = std::move(second_answer);
}

ConfidenceDecision RouteStream(std::span<const TokenEvent> trace, double tau,
                               std::string_view fallback) {
  RouterState state;
  std::optional<ConfidenceDecision> decision;
  for (const TokenEvent& event : trace) {
    decision = StreamStep(state, event, tau, fallback);
    if (decision) break;
  }
  if (!decision) decision = FinishStream(state, tau, fallback);
  if (decision->action == RouteAction::kEarlyExit ||
      decision->malformed_prefix) {
    return *decision;
  }
  std::string text;
  for (const TokenEvent& t : trace) text += t.text;
  const ParsedResponse parsed =
      ParseResponse(text, TemplateKind::kDualAnswer, fallback);
  if (parsed.second_answer) {
    Finalize(state, parsed.second_answer->text);
    return *state.decision;
  }
  return *decision;
}

}  // namespace autothink
