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

#ifndef AUTOTHINK_REWARD_H_
#define AUTOTHINK_REWARD_H_

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "autothink/grammar.h"
#include "autothink/segments.h"

namespace autothink {

enum class TaskKind { kQa, kGrounding, kGroundingQa };

std::string_view TaskKindName(TaskKind kind);
std::optional<TaskKind> ParseTaskKind(std::string_view name);

enum class AnswerKind { kMcq, kText, kNumeric };

std::string_view AnswerKindName(AnswerKind kind);
std::optional<AnswerKind> ParseAnswerKind(std::string_view name);

struct QaTruth {
  std::string answer;
  AnswerKind kind = AnswerKind::kText;
};

struct GroundingTruth {
  std::vector<Segment> segments;
};

struct GroundingQaTruth {
  QaTruth qa;
  std::vector<Segment> segments;
};

using GroundTruth = std::variant<QaTruth, GroundingTruth, GroundingQaTruth>;

// Throws Error(kInvalidGroundTruth) on an empty QA answer, an empty segment
// list or a segment violating 0 <= start < end.
void ValidateGroundTruth(const GroundTruth& truth);

struct RewardConfig {
  double w1 = 0.9;
  double w2 = 1.1;
  double lambda_fmt = 1.0;
  double alpha = 0.3;
  std::string fallback = std::string(kDefaultFallback);
};

struct RewardBreakdown {
  double r_task_first = 0.0;
  double r_task_second = 0.0;
  int r_fmt = 0;
  int r_fallback = 0;
  double total = 0.0;

  // Everything except the format term, i.e. the quantity tabulated when
  // comparing coefficient choices.
  double TaskAndFallback(const RewardConfig& cfg) const;
};

// Evaluates w1*r1 + w2*r2 + lambda*fmt + alpha*fallback left to right.
double WeightedTotal(const RewardBreakdown& parts, const RewardConfig& cfg);

// First standalone A-E letter (either case), optionally followed by ')', '.'
// or ':'; returned upper-case.
std::optional<char> ExtractOptionLetter(std::string_view answer);

// Mini stand-in for a CAS checker: integers, decimals, p/q, \frac{p}{q},
// optional sign and surrounding '$'. Returns the parsed value if any.
std::optional<double> ParseNumeric(std::string_view s);

// Values agree within 1e-6 relative tolerance when both parse; otherwise the
// normalized strings must match.
bool NumericEquivalent(std::string_view a, std::string_view b);

int QaReward(std::string_view answer, const QaTruth& truth,
             std::string_view fallback = kDefaultFallback);

double GroundingReward(std::string_view answer_text,
                       const std::vector<Segment>& truth_segments);

struct GroundingQaParts {
  int qa = 0;
  double grounding = 0.0;
  double sum() const { return qa + grounding; }
};

// The segment text recognized by ParseSegments is cut out before the QA
// component is scored.
GroundingQaParts ScoreGroundingQa(std::string_view answer_text,
                                  const GroundingQaTruth& truth,
                                  std::string_view fallback = kDefaultFallback);
double GroundingQaReward(std::string_view answer_text,
                         const GroundingQaTruth& truth,
                         std::string_view fallback = kDefaultFallback);

// Task reward of one answer string against any ground-truth variant.
double TaskReward(std::string_view answer, const GroundTruth& truth,
                  std::string_view fallback = kDefaultFallback);

// Whether an answer counts as "correct" for paying the fallback bonus: QA
// reward 1, grounding tIoU >= 0.5, grounding-QA both components >= 0.5.
bool AnswerCorrectForBonus(std::string_view answer, const GroundTruth& truth,
                           std::string_view fallback = kDefaultFallback);

inline constexpr double kBonusTiouThreshold = 0.5;

RewardBreakdown CombineDualReward(const ParsedResponse& parsed,
                                  const GroundTruth& truth,
                                  const RewardConfig& cfg);

// Dispatches on the template: DualAnswer uses CombineDualReward; the
// single-answer templates score their only box with task weight 1 plus the
// format term and never pay a fallback bonus.
RewardBreakdown ScoreResponse(const ParsedResponse& parsed,
                              const GroundTruth& truth,
                              const RewardConfig& cfg);

}  // namespace autothink

#endif  // AUTOTHINK_REWARD_H_
