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

#ifndef AUTOTHINK_RECORDS_H_
#define AUTOTHINK_RECORDS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autothink/data_filter.h"
#include "autothink/grammar.h"
#include "autothink/grpo.h"
#include "autothink/metrics.h"
#include "autothink/reward.h"
#include "autothink/router.h"

// JSONL schemas shared by the command-line tool and the bindings. Every
// Parse* function takes one line and throws Error(kSchemaError) on malformed
// input; every *ToJson function returns one line without the trailing newline.
// Reals are written in the shortest form that round-trips to the same double,
// which is never fewer digits than needed to recover the value exactly.
namespace autothink::records {

// Shortest round-trip decimal for CSV output; "null" for non-finite values.
std::string FormatReal(double value);

// Ground truth objects, keyed by the record's task:
//   qa:           {"answer": "B", "kind": "mcq" | "text" | "numeric"}
//   grounding:    {"segments": [[s, e], ...]}
//   grounding_qa: {"answer": ..., "kind": ..., "segments": [[s, e], ...]}
// Segments violating 0 <= s < e are schema errors.
GroundTruth ParseGroundTruthJson(TaskKind task, std::string_view json_object);

// {"id", "task", "question"?, "ground_truth", "rollout_correct"?: [bool|0|1]}
SampleRecord ParseSampleRecord(std::string_view line);

// {"id", "response", "template"?}; `default_kind` applies when "template" is
// absent.
struct ParseRequest {
  std::string id;
  std::string response;
  TemplateKind kind = TemplateKind::kDualAnswer;
};
ParseRequest ParseParseRequest(
    std::string_view line,
    TemplateKind default_kind = TemplateKind::kDualAnswer);
std::string ParsedToJson(const std::string& id, const ParsedResponse& parsed);

// {"id", "response", "task", "ground_truth", "template"?}
struct ScoreRequest {
  std::string id;
  std::string response;
  TemplateKind kind = TemplateKind::kDualAnswer;
  TaskKind task = TaskKind::kQa;
  GroundTruth truth;
};
ScoreRequest ParseScoreRequest(
    std::string_view line,
    TemplateKind default_kind = TemplateKind::kDualAnswer);
std::string RewardToJson(const std::string& id, const RewardBreakdown& r);

// {"id", "tokens": [{"text", "logprob"}], "tau"?, "correct_first"?,
//  "correct_second"?}
struct TraceRecord {
  std::string id;
  std::vector<TokenEvent> tokens;
  std::optional<double> tau;
  std::optional<bool> correct_first;
  std::optional<bool> correct_second;
};
TraceRecord ParseTraceRecord(std::string_view line);
// {"id", "score", "action", "answer"}; score is null when unscored, answer
// null while pending.
std::string DecisionToJson(const std::string& id,
                           const ConfidenceDecision& decision);

// {"prompt_id", "rewards", "logprob_new", "logprob_old", "logprob_ref"}; the
// log-prob arrays default to zeros when absent.
grpo::GroupRollout ParseGroupRecord(std::string_view line);
std::string AdvantagesToJson(const std::string& prompt_id,
                             const grpo::AdvantageSet& adv);
std::string LossToJson(const std::string& prompt_id, double loss);

// {"id", "task"?, "benchmark"?, "correct_first"?, "correct_second"?,
//  "action", "response_tokens"?, "response"?, "pred_segments"?,
//  "pred_answer"?, "truth_segments"?}
metrics::EvalRecord ParseEvalRecord(std::string_view line);

}  // namespace autothink::records

#endif  // AUTOTHINK_RECORDS_H_
