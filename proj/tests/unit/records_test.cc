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

#include "autothink/records.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "autothink/error.h"
#include "json.hpp"

namespace autothink::records {
namespace {

using nlohmann::json;

void ExpectSchemaError(const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected schema_error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError) << e.what();
  }
}

TEST(FormatRealTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatReal(0.86), "0.86");
  EXPECT_EQ(FormatReal(1.0), "1");
  EXPECT_EQ(FormatReal(1.1 + 0.3), "1.4000000000000001");
  EXPECT_EQ(FormatReal(std::nan("")), "null");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(static_cast<double>(rng() >> 11), -40) - 1e3;
    EXPECT_EQ(std::stod(FormatReal(v)), v);
  }
}

TEST(GroundTruthJsonTest, Variants) {
  auto qa = ParseGroundTruthJson(TaskKind::kQa, R"({"answer":"B","kind":"mcq"})");
  EXPECT_EQ(std::get<QaTruth>(qa).kind, AnswerKind::kMcq);
  auto g = ParseGroundTruthJson(TaskKind::kGrounding,
                                R"({"segments":[[1,2],[3.5,4]]})");
  EXPECT_EQ(std::get<GroundingTruth>(g).segments.size(), 2u);
  auto gq = ParseGroundTruthJson(
      TaskKind::kGroundingQa,
      R"({"answer":"3","kind":"numeric","segments":[[0,1]]})");
  EXPECT_EQ(std::get<GroundingQaTruth>(gq).qa.answer, "3");

  ExpectSchemaError([] {
    ParseGroundTruthJson(TaskKind::kGrounding, R"({"segments":[[2,1]]})");
  });
  ExpectSchemaError(
      [] { ParseGroundTruthJson(TaskKind::kQa, R"({"answer":"B","kind":"x"})"); });
  ExpectSchemaError([] { ParseGroundTruthJson(TaskKind::kQa, R"([1])"); });
}

TEST(SampleRecordTest, ParsesLabels) {
  const auto r = ParseSampleRecord(
      R"({"id":7,"task":"qa","question":"q?","ground_truth":{"answer":"B","kind":"mcq"},"rollout_correct":[true,0,1,false]})");
  EXPECT_EQ(r.id, "7");
  EXPECT_EQ(r.question, "q?");
  EXPECT_EQ(*r.rollout_correct, (std::vector<bool>{true, false, true, false}));
  ExpectSchemaError([] {
    ParseSampleRecord(
        R"({"id":"x","task":"qa","ground_truth":{"answer":"B"},"rollout_correct":[2]})");
  });
  ExpectSchemaError([] { ParseSampleRecord("{not json"); });
  ExpectSchemaError([] { ParseSampleRecord(R"({"task":"qa"})"); });
  ExpectSchemaError([] {
    ParseSampleRecord(R"({"id":"x","task":"video","ground_truth":{}})");
  });
}

TEST(ParseRequestTest, TemplateDefaulting) {
  auto r = ParseParseRequest(R"({"id":"a","response":"\\boxed{A}"})");
  EXPECT_EQ(r.kind, TemplateKind::kDualAnswer);
  r = ParseParseRequest(R"({"id":"a","response":"\\boxed{A}"})",
                        TemplateKind::kDirectAnswer);
  EXPECT_EQ(r.kind, TemplateKind::kDirectAnswer);
  r = ParseParseRequest(
      R"({"id":"a","response":"x","template":"think_then_answer"})",
      TemplateKind::kDirectAnswer);
  EXPECT_EQ(r.kind, TemplateKind::kThinkThenAnswer);
  ExpectSchemaError([] {
    ParseParseRequest(R"({"id":"a","response":"x","template":"cot"})");
  });
}

TEST(ParsedToJsonTest, Fields) {
  const auto p = ParseResponse("\\boxed{A}<think>r</think>\\boxed{B}",
                               TemplateKind::kDualAnswer);
  const json j = json::parse(ParsedToJson("id1", p));
  EXPECT_EQ(j["format_ok"], true);
  EXPECT_EQ(j["first_answer"]["text"], "A");
  EXPECT_EQ(j["first_answer"]["begin"], 7);
  EXPECT_EQ(j["think"], "r");
  EXPECT_EQ(j["second_answer"]["text"], "B");
  const auto bad = ParseResponse("nothing", TemplateKind::kDualAnswer);
  const json k = json::parse(ParsedToJson("id2", bad));
  EXPECT_TRUE(k["first_answer"].is_null());
  EXPECT_TRUE(k["think"].is_null());
}

TEST(ScoreRequestTest, RoundTrip) {
  const auto req = ParseScoreRequest(
      R"({"id":"s","response":"\\boxed{B}<think>r</think>\\boxed{B}","task":"qa","ground_truth":{"answer":"B","kind":"mcq"}})");
  const auto r = ScoreResponse(
      ParseResponse(req.response, req.kind), req.truth, RewardConfig{});
  const json j = json::parse(RewardToJson(req.id, r));
  EXPECT_EQ(j["total"].get<double>(), r.total);
  EXPECT_EQ(j["r_fmt"], 1);
  ExpectSchemaError([] {
    ParseScoreRequest(R"({"id":"s","response":"x","task":"qa"})");
  });
}

TEST(TraceRecordTest, ParseAndDecisionOutput) {
  const auto t = ParseTraceRecord(
      R"({"id":"t","tokens":[{"text":"\\boxed{","logprob":-0.1},{"text":"B","logprob":-0.001},{"text":"}","logprob":0}],"tau":0.9,"correct_first":1})");
  EXPECT_EQ(t.tokens.size(), 3u);
  EXPECT_EQ(t.tau, 0.9);
  EXPECT_EQ(t.correct_first, true);
  EXPECT_FALSE(t.correct_second);
  ExpectSchemaError([] {
    ParseTraceRecord(R"({"id":"t","tokens":[{"text":"x","logprob":0.5}]})");
  });
  ExpectSchemaError(
      [] { ParseTraceRecord(R"({"id":"t","tokens":[{"text":"x"}]})"); });

  const auto d = RouteTrace(t.tokens, 0.97);
  const json j = json::parse(DecisionToJson(t.id, d));
  EXPECT_EQ(j["action"], "early_exit");
  EXPECT_EQ(j["answer"], "B");
  EXPECT_EQ(j["score"].get<double>(), d.score.value);
  EXPECT_FALSE(j.contains("malformed_prefix"));

  ConfidenceDecision unscored = Decide(Confidence::Unscored(), 0.97);
  unscored.malformed_prefix = true;
  const json u = json::parse(DecisionToJson("u", unscored));
  EXPECT_TRUE(u["score"].is_null());
  EXPECT_TRUE(u["answer"].is_null());
  EXPECT_EQ(u["malformed_prefix"], true);

  const json f = json::parse(
      DecisionToJson("f", Decide(Confidence::Fallback(), 0.97)));
  EXPECT_EQ(f["score"].get<double>(), -1e6);
}

TEST(GroupRecordTest, DefaultsAndLengthChecks) {
  const auto g = ParseGroupRecord(R"({"prompt_id":"p","rewards":[1,0,0.5]})");
  ASSERT_EQ(g.outputs.size(), 3u);
  EXPECT_EQ(g.outputs[2].reward, 0.5);
  EXPECT_EQ(g.outputs[2].logprob_ref, 0.0);
  ExpectSchemaError([] {
    ParseGroupRecord(R"({"prompt_id":"p","rewards":[1,0],"logprob_new":[0]})");
  });
  const auto adv = grpo::NormalizeAdvantages(g.rewards(), 1e-4);
  const json j = json::parse(AdvantagesToJson("p", adv));
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(j["advantages"][i].get<double>(), adv.values[i]);
  }
  EXPECT_EQ(json::parse(LossToJson("p", 0.125))["loss"], 0.125);
}

TEST(EvalRecordTest, Fields) {
  const auto r = ParseEvalRecord(
      R"({"id":"e","task":"grounding","benchmark":"charades","action":"continue","response_tokens":12,"pred_answer":"from 1 to 2","truth_segments":[[1,3]],"correct_first":false})");
  EXPECT_EQ(r.task, TaskKind::kGrounding);
  EXPECT_EQ(r.benchmark, "charades");
  EXPECT_EQ(r.action, RouteAction::kContinue);
  EXPECT_EQ(r.response_tokens, 12u);
  EXPECT_EQ(r.truth_segments->size(), 1u);
  EXPECT_EQ(r.correct_first, false);
  ExpectSchemaError([] { ParseEvalRecord(R"({"id":"e","action":"stop"})"); });
  ExpectSchemaError([] {
    ParseEvalRecord(R"({"id":"e","action":"continue","response_tokens":-1})");
  });
}

}  // namespace
}  // namespace autothink::records
