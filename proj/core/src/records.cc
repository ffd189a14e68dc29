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

#include <charconv>
#include <cmath>
#include <cstdio>

#include "autothink/error.h"
#include "json.hpp"

namespace autothink::records {
namespace {

using nlohmann::json;

[[noreturn]] void SchemaError(const std::string& message) {
  throw Error(ErrorCode::kSchemaError, message);
}

json ParseObject(std::string_view line) {
  json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) SchemaError("line is not valid JSON");
  if (!doc.is_object()) SchemaError("line is not a JSON object");
  return doc;
}

const json& Required(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

std::string RequiredString(const json& obj, const char* key) {
  const json& v = Required(obj, key);
  if (!v.is_string()) SchemaError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

// Ids may be strings or integers; both are kept as text.
std::string RequiredId(const json& obj, const char* key) {
  const json& v = Required(obj, key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  SchemaError(std::string("'") + key + "' must be a string or integer");
}

double NumberValue(const json& v, const char* what) {
  if (!v.is_number()) SchemaError(std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) SchemaError(std::string(what) + " must be finite");
  return d;
}

std::optional<bool> OptionalBool(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number_integer()) {
    const auto v = it->get<int64_t>();
    if (v == 0 || v == 1) return v == 1;
  }
  SchemaError(std::string("'") + key + "' must be a boolean or 0/1");
}

TemplateKind OptionalTemplate(const json& obj, TemplateKind default_kind) {
  auto it = obj.find("template");
  if (it == obj.end() || it->is_null()) return default_kind;
  if (!it->is_string()) SchemaError("'template' must be a string");
  auto kind = ParseTemplateName(it->get<std::string>());
  if (!kind) SchemaError("unknown template '" + it->get<std::string>() + "'");
  return *kind;
}

TaskKind RequiredTask(const json& obj) {
  const std::string name = RequiredString(obj, "task");
  auto task = ParseTaskKind(name);
  if (!task) SchemaError("unknown task '" + name + "'");
  return *task;
}

std::vector<Segment> SegmentsValue(const json& v, bool require_valid) {
  if (!v.is_array()) SchemaError("segments must be an array of [start, end]");
  std::vector<Segment> out;
  for (const json& pair : v) {
    if (!pair.is_array() || pair.size() != 2) {
      SchemaError("segments must be an array of [start, end]");
    }
    Segment s{NumberValue(pair[0], "segment start"),
              NumberValue(pair[1], "segment end")};
    if (require_valid && !s.valid()) {
      SchemaError("segment must satisfy 0 <= start < end");
    }
    out.push_back(s);
  }
  return out;
}

QaTruth QaValue(const json& obj) {
  QaTruth qa;
  qa.answer = RequiredString(obj, "answer");
  auto it = obj.find("kind");
  if (it != obj.end()) {
    if (!it->is_string()) SchemaError("'kind' must be a string");
    auto kind = ParseAnswerKind(it->get<std::string>());
    if (!kind) SchemaError("unknown answer kind '" + it->get<std::string>() + "'");
    qa.kind = *kind;
  }
  return qa;
}

GroundTruth GroundTruthValue(TaskKind task, const json& obj) {
  if (!obj.is_object()) SchemaError("'ground_truth' must be an object");
  switch (task) {
    case TaskKind::kQa:
      return QaValue(obj);
    case TaskKind::kGrounding:
      return GroundingTruth{SegmentsValue(Required(obj, "segments"), true)};
    case TaskKind::kGroundingQa:
      return GroundingQaTruth{QaValue(obj),
                              SegmentsValue(Required(obj, "segments"), true)};
  }
  SchemaError("unknown task");
}

json SpanJson(const std::optional<AnswerSpan>& span) {
  if (!span) return nullptr;
  return json{{"text", span->text},
              {"begin", span->char_span.begin},
              {"end", span->char_span.end},
              {"is_fallback", span->is_fallback}};
}

}  // namespace

std::string FormatReal(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

GroundTruth ParseGroundTruthJson(TaskKind task, std::string_view json_object) {
  return GroundTruthValue(task, ParseObject(json_object));
}

SampleRecord ParseSampleRecord(std::string_view line) {
  const json obj = ParseObject(line);
  SampleRecord rec;
  rec.id = RequiredId(obj, "id");
  rec.task = RequiredTask(obj);
  if (auto it = obj.find("question"); it != obj.end() && it->is_string()) {
    rec.question = it->get<std::string>();
  }
  rec.ground_truth = GroundTruthValue(rec.task, Required(obj, "ground_truth"));
  if (auto it = obj.find("rollout_correct"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) SchemaError("'rollout_correct' must be an array");
    std::vector<bool> labels;
    for (const json& v : *it) {
      if (v.is_boolean()) {
        labels.push_back(v.get<bool>());
      } else if (v.is_number_integer() &&
                 (v.get<int64_t>() == 0 || v.get<int64_t>() == 1)) {
        labels.push_back(v.get<int64_t>() == 1);
      } else {
        SchemaError("'rollout_correct' entries must be booleans or 0/1");
      }
    }
    rec.rollout_correct = std::move(labels);
  }
  return rec;
}

ParseRequest ParseParseRequest(std::string_view line,
                               TemplateKind default_kind) {
  const json obj = ParseObject(line);
  return {RequiredId(obj, "id"), RequiredString(obj, "response"),
          OptionalTemplate(obj, default_kind)};
}

std::string ParsedToJson(const std::string& id, const ParsedResponse& parsed) {
  json out{{"id", id},
           {"template", TemplateName(parsed.kind)},
           {"format_ok", parsed.format_ok},
           {"first_answer", SpanJson(parsed.first_answer)},
           {"think", parsed.think_text ? json(*parsed.think_text) : json()},
           {"second_answer", SpanJson(parsed.second_answer)}};
  return out.dump();
}

ScoreRequest ParseScoreRequest(std::string_view line,
                               TemplateKind default_kind) {
  const json obj = ParseObject(line);
  ScoreRequest req;
  req.id = RequiredId(obj, "id");
  req.response = RequiredString(obj, "response");
  req.kind = OptionalTemplate(obj, default_kind);
  req.task = RequiredTask(obj);
  req.truth = GroundTruthValue(req.task, Required(obj, "ground_truth"));
  return req;
}

std::string RewardToJson(const std::string& id, const RewardBreakdown& r) {
  json out{{"id", id},
           {"r_task_first", r.r_task_first},
           {"r_task_second", r.r_task_second},
           {"r_fmt", r.r_fmt},
           {"r_fallback", r.r_fallback},
           {"total", r.total}};
  return out.dump();
}

TraceRecord ParseTraceRecord(std::string_view line) {
  const json obj = ParseObject(line);
  TraceRecord rec;
  rec.id = RequiredId(obj, "id");
  const json& tokens = Required(obj, "tokens");
  if (!tokens.is_array()) SchemaError("'tokens' must be an array");
  for (const json& t : tokens) {
    if (!t.is_object()) SchemaError("token must be an object");
    TokenEvent ev;
    ev.text = RequiredString(t, "text");
    ev.logprob = NumberValue(Required(t, "logprob"), "logprob");
    if (ev.logprob > 0.0) SchemaError("logprob must be <= 0");
    rec.tokens.push_back(std::move(ev));
  }
  if (auto it = obj.find("tau"); it != obj.end() && !it->is_null()) {
    rec.tau = NumberValue(*it, "tau");
  }
  rec.correct_first = OptionalBool(obj, "correct_first");
  rec.correct_second = OptionalBool(obj, "correct_second");
  return rec;
}

std::string DecisionToJson(const std::string& id,
                           const ConfidenceDecision& decision) {
  json out{{"id", id}};
  if (auto score = decision.score.serialized()) {
    out["score"] = *score;
  } else {
    out["score"] = nullptr;
  }
  out["action"] = RouteActionName(decision.action);
  out["answer"] =
      decision.chosen_answer ? json(*decision.chosen_answer) : json();
  if (decision.malformed_prefix) out["malformed_prefix"] = true;
  return out.dump();
}

grpo::GroupRollout ParseGroupRecord(std::string_view line) {
  const json obj = ParseObject(line);
  grpo::GroupRollout group;
  group.prompt_id = RequiredId(obj, "prompt_id");
  const json& rewards = Required(obj, "rewards");
  if (!rewards.is_array()) SchemaError("'rewards' must be an array");
  group.outputs.resize(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) {
    group.outputs[i].reward = NumberValue(rewards[i], "reward");
  }
  auto fill = [&](const char* key, double grpo::Output::*field) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    if (!it->is_array() || it->size() != rewards.size()) {
      SchemaError(std::string("'") + key + "' must match 'rewards' in length");
    }
    for (size_t i = 0; i < it->size(); ++i) {
      group.outputs[i].*field = NumberValue((*it)[i], key);
    }
  };
  fill("logprob_new", &grpo::Output::logprob_new);
  fill("logprob_old", &grpo::Output::logprob_old);
  fill("logprob_ref", &grpo::Output::logprob_ref);
  return group;
}

std::string AdvantagesToJson(const std::string& prompt_id,
                             const grpo::AdvantageSet& adv) {
  json values = json::array();
  for (double v : adv.values) values.push_back(v);
  json out{{"prompt_id", prompt_id},
           {"advantages", values},
           {"mean", adv.mean},
           {"std", adv.std}};
  return out.dump();
}

std::string LossToJson(const std::string& prompt_id, double loss) {
  json out{{"prompt_id", prompt_id}, {"loss", loss}};
  return out.dump();
}

metrics::EvalRecord ParseEvalRecord(std::string_view line) {
  const json obj = ParseObject(line);
  metrics::EvalRecord rec;
  rec.id = RequiredId(obj, "id");
  if (obj.contains("task")) rec.task = RequiredTask(obj);
  if (auto it = obj.find("benchmark"); it != obj.end() && it->is_string()) {
    rec.benchmark = it->get<std::string>();
  }
  rec.correct_first = OptionalBool(obj, "correct_first");
  rec.correct_second = OptionalBool(obj, "correct_second");
  const std::string action = RequiredString(obj, "action");
  auto parsed_action = ParseRouteAction(action);
  if (!parsed_action) SchemaError("unknown action '" + action + "'");
  rec.action = *parsed_action;
  if (auto it = obj.find("response_tokens"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int64_t>() < 0) {
      SchemaError("'response_tokens' must be a non-negative integer");
    }
    rec.response_tokens = it->get<uint64_t>();
  }
  if (auto it = obj.find("response"); it != obj.end() && it->is_string()) {
    rec.response = it->get<std::string>();
  }
  if (auto it = obj.find("pred_segments"); it != obj.end() && !it->is_null()) {
    rec.pred_segments = SegmentsValue(*it, /*require_valid=*/false);
  }
  if (auto it = obj.find("pred_answer"); it != obj.end() && it->is_string()) {
    rec.pred_answer = it->get<std::string>();
  }
  if (auto it = obj.find("truth_segments"); it != obj.end() && !it->is_null()) {
    rec.truth_segments = SegmentsValue(*it, /*require_valid=*/true);
  }
  return rec;
}

}  // namespace autothink::records
