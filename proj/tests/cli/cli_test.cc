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

#include "cli.h"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace autothink::cli {
namespace {

const std::string kData = AUTOTHINK_TEST_DATA_DIR;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation Invoke(std::vector<std::string> args, const std::string& in = "") {
  args.insert(args.begin(), "autothink");
  std::istringstream is(in);
  std::ostringstream os, es;
  Invocation r;
  r.code = Run(args, is, os, es);
  r.out = os.str();
  r.err = es.str();
  return r;
}

std::vector<nlohmann::json> JsonLines(const std::string& text) {
  std::vector<nlohmann::json> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

std::vector<std::vector<double>> CsvRows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

TEST(CliTest, ScoreReproducesCoefficientTable) {
  const auto r = Invoke({"score", kData + "/coefficient_responses.jsonl"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::map<std::string, double> expected = {
      {"wrong_wrong", 1.0},      {"fallback_wrong", 1.0},
      {"correct_wrong", 1.9},    {"wrong_correct", 2.1},
      {"fallback_correct", 2.4}, {"correct_correct", 3.0}};
  const auto rows = JsonLines(r.out);
  ASSERT_EQ(rows.size(), expected.size());
  for (const auto& row : rows) {
    EXPECT_NEAR(row["total"].get<double>(),
                expected.at(row["id"].get<std::string>()), 1e-12);
  }
  EXPECT_NE(r.err.find("read=6 written=6 errors=0"), std::string::npos);
}

TEST(CliTest, AlphaFlagChangesOnlyTheFallbackRow) {
  const auto r =
      Invoke({"--alpha", "0", "score", kData + "/coefficient_responses.jsonl"});
  ASSERT_EQ(r.code, kExitOk);
  for (const auto& row : JsonLines(r.out)) {
    if (row["id"] == "fallback_correct") {
      EXPECT_NEAR(row["total"].get<double>(), 2.1, 1e-12);
    }
  }
}

TEST(CliTest, BatchAndStreamRoutingAgree) {
  const auto batch = Invoke({"route", kData + "/sweep_traces.jsonl"});
  const auto stream =
      Invoke({"route", "--mode", "stream", kData + "/sweep_traces.jsonl"});
  ASSERT_EQ(batch.code, kExitOk);
  ASSERT_EQ(stream.code, kExitOk);
  EXPECT_EQ(batch.out, stream.out);
  // Default tau 0.97: confidence >= 0.97 exits.
  EXPECT_NE(batch.err.find("early_exit=4 continue=7"), std::string::npos)
      << batch.err;
}

TEST(CliTest, ExplicitTauOverridesRecord) {
  const std::string rec =
      R"({"id":"x","tau":0.5,"tokens":[{"text":"\\boxed{A}","logprob":-0.1},)"
      R"({"text":"<think>","logprob":-0.2}]})";
  EXPECT_EQ(JsonLines(Invoke({"route"}, rec).out)[0]["action"], "early_exit");
  EXPECT_EQ(JsonLines(Invoke({"--tau", "0.95", "route"}, rec).out)[0]["action"],
            "continue");
}

TEST(CliTest, SweepTauIsMonotone) {
  const auto r = Invoke({"sweep-tau", kData + "/sweep_traces.jsonl"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = CsvRows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  for (size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i][0], rows[i - 1][0]);
    EXPECT_GE(rows[i][1], rows[i - 1][1]);
    EXPECT_GE(rows[i][2], rows[i - 1][2]);
  }
  EXPECT_GT(rows.back()[2], rows.front()[2]);
}

TEST(CliTest, AdvantageAndLoss) {
  const std::string group =
      R"({"prompt_id":"p","rewards":[1,0,0.5,1],)"
      R"("logprob_new":[-1.2,-0.7,-2.0,-0.3],)"
      R"("logprob_old":[-1.0,-0.9,-1.5,-0.35],)"
      R"("logprob_ref":[-1.1,-0.8,-1.9,-0.5]})";
  const auto adv = Invoke({"--group-size", "4", "advantage"}, group);
  ASSERT_EQ(adv.code, kExitOk) << adv.err;
  double sum = 0.0;
  const auto rows = JsonLines(adv.out);
  ASSERT_EQ(rows.size(), 1u) << adv.err;
  for (const auto& a : rows[0]["advantages"]) sum += a.get<double>();
  EXPECT_NEAR(sum, 0.0, 1e-12);
  const auto loss = Invoke({"--group-size", "4", "loss"}, group);
  ASSERT_EQ(loss.code, kExitOk) << loss.err;
  ASSERT_EQ(JsonLines(loss.out).size(), 1u) << loss.err;
  EXPECT_NEAR(JsonLines(loss.out)[0]["loss"].get<double>(),
              0.097826873513475276782, 1e-12);
  const auto wrong = Invoke({"--group-size", "16", "--strict", "advantage"},
                            group);
  EXPECT_EQ(wrong.code, kExitData);
  EXPECT_NE(wrong.err.find("code=group_size_mismatch"), std::string::npos);
}

TEST(CliTest, TrainSimIsDeterministic) {
  const auto a = Invoke({"--seed", "3", "train-sim", "--steps", "20"});
  const auto b = Invoke({"--seed", "3", "train-sim", "--steps", "20"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("step,mean_r1,mean_r2,mean_total,fallback_rate\n", 0),
            0u);
  EXPECT_EQ(CsvRows(a.out).size(), 20u);
  EXPECT_EQ(Invoke({"train-sim", "--steps", "0"}).code, kExitUsage);
}

TEST(CliTest, FilterKeepsMixedOutcomes) {
  const std::string in =
      R"({"id":"a","task":"qa","ground_truth":{"answer":"B","kind":"mcq"},"rollout_correct":[true,true,true,true,true,true,true,true]})"
      "\n"
      R"({"id":"b","task":"qa","ground_truth":{"answer":"B","kind":"mcq"},"rollout_correct":[true,false,false,false,false,false,false,false]})"
      "\n"
      R"({"id":"c","task":"qa","ground_truth":{"answer":"B","kind":"mcq"},"rollout_correct":[false,false,false,false,false,false,false,false]})"
      "\n";
  const auto r = Invoke({"filter"}, in);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = JsonLines(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["id"], "b");
}

TEST(CliTest, BadRecordsAreSkippedOrFatalUnderStrict) {
  const std::string in =
      "{\"id\":1}\nnot json\n"
      R"({"id":"ok","task":"qa","response":"\\boxed{B}","ground_truth":{"answer":"B","kind":"mcq"}})"
      "\n";
  const auto lenient = Invoke({"score"}, in);
  EXPECT_EQ(lenient.code, kExitOk);
  EXPECT_EQ(JsonLines(lenient.out).size(), 1u);
  EXPECT_NE(lenient.err.find("errors=2"), std::string::npos);
  EXPECT_NE(lenient.err.find("line=2"), std::string::npos);
  const auto strict = Invoke({"--strict", "score"}, in);
  EXPECT_EQ(strict.code, kExitData);
  EXPECT_TRUE(strict.out.empty());
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({"score", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"--tau", "1.5", "route"}, "").code, kExitUsage);
  EXPECT_EQ(Invoke({"route", "--mode", "fast"}, "").code, kExitUsage);
  EXPECT_EQ(Invoke({"score", "/nonexistent/file.jsonl"}).code, kExitUsage);
}

TEST(CliTest, HelpListsDefaults) {
  const auto r = Invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  const std::string text = r.out + r.err;
  EXPECT_NE(text.find("[0.97]"), std::string::npos);
  EXPECT_NE(text.find("train-sim"), std::string::npos);
}

TEST(CliTest, ParseIsIdempotent) {
  const std::string in =
      R"({"id":"r","response":"\\boxed{A}<think>hm</think>\\boxed{B}"})" "\n";
  const auto a = Invoke({"parse"}, in);
  const auto b = Invoke({"parse"}, in);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto row = JsonLines(a.out)[0];
  EXPECT_EQ(row["format_ok"], true);
}

TEST(CliTest, OutputFlagWritesFile) {
  const std::string path = ::testing::TempDir() + "cli_out.jsonl";
  const auto r = Invoke({"--output", path, "score",
                         kData + "/coefficient_responses.jsonl"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(JsonLines(ss.str()).size(), 6u);
}

}  // namespace
}  // namespace autothink::cli
