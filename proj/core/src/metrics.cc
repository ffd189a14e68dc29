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

#include "autothink/metrics.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "autothink/error.h"
#include "autothink/text.h"
#include "json.hpp"

namespace autothink::metrics {
namespace {

using nlohmann::json;

void RequireNonEmpty(std::span<const EvalRecord> records) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "metric over an empty corpus");
  }
}

// Sorting first makes the sum independent of record order.
double OrderFreeSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

SliceMetrics Slice(std::span<const EvalRecord> records) {
  SliceMetrics s;
  s.count = records.size();
  s.accuracy = Accuracy(records);
  s.mean_length = MeanLength(records);
  s.think_ratio = ThinkRatio(records);
  return s;
}

json OptionalReal(const std::optional<double>& v) {
  return v ? json(*v) : json();
}

json SliceJson(const SliceMetrics& s) {
  return json{{"count", s.count},
              {"accuracy", OptionalReal(s.accuracy)},
              {"mean_length", s.mean_length},
              {"think_ratio", s.think_ratio}};
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Signed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.*f", digits, v);
  return buf;
}

std::string AlignRows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      if (c + 1 < row.size()) cell.resize(width[c] + 2, ' ');
      line += cell;
    }
    out << line << '\n';
  }
  return out.str();
}

std::string OptionalPct(const std::optional<double>& v) {
  return v ? Fixed(100.0 * *v, 1) : "n/a";
}

}  // namespace

uint64_t ResponseLength(const EvalRecord& rec) {
  if (rec.response_tokens) return *rec.response_tokens;
  if (!rec.response) return 0;
  uint64_t words = 0;
  bool in_word = false;
  for (char c : *rec.response) {
    const bool space = text::IsSpace(c);
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

std::optional<bool> ChosenCorrect(const EvalRecord& rec) {
  return rec.action == RouteAction::kEarlyExit ? rec.correct_first
                                               : rec.correct_second;
}

double ThinkRatio(std::span<const EvalRecord> records) {
  RequireNonEmpty(records);
  size_t think = 0;
  for (const EvalRecord& r : records) {
    if (r.action == RouteAction::kContinue) ++think;
  }
  return static_cast<double>(think) / static_cast<double>(records.size());
}

std::optional<double> RecallThinkNeeded(std::span<const EvalRecord> records) {
  size_t needed = 0;
  size_t routed = 0;
  for (const EvalRecord& r : records) {
    if (r.correct_first == false && r.correct_second == true) {
      ++needed;
      if (r.action == RouteAction::kContinue) ++routed;
    }
  }
  if (needed == 0) return std::nullopt;
  return static_cast<double>(routed) / static_cast<double>(needed);
}

std::optional<double> Accuracy(std::span<const EvalRecord> records) {
  RequireNonEmpty(records);
  size_t known = 0;
  size_t correct = 0;
  for (const EvalRecord& r : records) {
    if (auto c = ChosenCorrect(r)) {
      ++known;
      if (*c) ++correct;
    }
  }
  if (known == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(known);
}

double MeanLength(std::span<const EvalRecord> records) {
  RequireNonEmpty(records);
  uint64_t total = 0;
  for (const EvalRecord& r : records) total += ResponseLength(r);
  return static_cast<double>(total) / static_cast<double>(records.size());
}

double RecordTiou(const EvalRecord& rec) {
  if (!rec.truth_segments) return 0.0;
  std::vector<Segment> predicted;
  if (rec.pred_segments) {
    for (const Segment& s : *rec.pred_segments) {
      if (s.valid()) predicted.push_back(s);
    }
  } else if (rec.pred_answer) {
    predicted = ParseSegments(*rec.pred_answer).segments;
  }
  return BestPairTiou(predicted, *rec.truth_segments);
}

std::optional<GroundingMetrics> ComputeGroundingMetrics(
    std::span<const EvalRecord> records) {
  std::vector<double> tious;
  for (const EvalRecord& r : records) {
    if (r.truth_segments) tious.push_back(RecordTiou(r));
  }
  if (tious.empty()) return std::nullopt;
  GroundingMetrics m;
  m.count = tious.size();
  const double n = static_cast<double>(tious.size());
  for (size_t k = 0; k < kRecallThresholds.size(); ++k) {
    const auto hits = std::count_if(tious.begin(), tious.end(), [&](double v) {
      return v >= kRecallThresholds[k];
    });
    m.recall_at[k] = static_cast<double>(hits) / n;
  }
  m.miou = OrderFreeSum(tious) / n;
  return m;
}

EvalMetrics Evaluate(std::span<const EvalRecord> records) {
  RequireNonEmpty(records);
  EvalMetrics m;
  m.pooled = Slice(records);
  m.recall_think_needed = RecallThinkNeeded(records);
  m.grounding = ComputeGroundingMetrics(records);

  std::map<std::string, std::vector<EvalRecord>> groups;
  for (const EvalRecord& r : records) groups[r.benchmark].push_back(r);
  std::vector<double> lengths;
  for (const auto& [name, group] : groups) {
    m.per_benchmark[name] = Slice(group);
    lengths.push_back(m.per_benchmark[name].mean_length);
  }
  m.macro_mean_length = OrderFreeSum(lengths) / static_cast<double>(lengths.size());
  return m;
}

std::string MetricsToJson(const EvalMetrics& m) {
  json out = SliceJson(m.pooled);
  out["recall_think_needed"] = OptionalReal(m.recall_think_needed);
  if (m.grounding) {
    json recall = json::object();
    for (size_t k = 0; k < kRecallThresholds.size(); ++k) {
      recall[Fixed(kRecallThresholds[k], 1)] = m.grounding->recall_at[k];
    }
    out["grounding"] = json{{"count", m.grounding->count},
                            {"recall_at", recall},
                            {"miou", m.grounding->miou}};
  } else {
    out["grounding"] = nullptr;
  }
  json per = json::object();
  for (const auto& [name, slice] : m.per_benchmark) {
    per[name.empty() ? "default" : name] = SliceJson(slice);
  }
  out["per_benchmark"] = per;
  out["macro_mean_length"] = m.macro_mean_length;
  return out.dump(2);
}

std::string FormatMetricsTable(const EvalMetrics& m) {
  std::vector<std::vector<std::string>> rows = {
      {"Benchmark", "N", "Acc", "Len", "Think"}};
  auto add = [&](const std::string& name, const SliceMetrics& s) {
    rows.push_back({name, std::to_string(s.count), OptionalPct(s.accuracy),
                    Fixed(s.mean_length, 1), Fixed(100.0 * s.think_ratio, 1)});
  };
  if (m.per_benchmark.size() > 1) {
    for (const auto& [name, slice] : m.per_benchmark) add(name, slice);
  }
  add("Overall", m.pooled);
  std::string out = AlignRows(rows);
  out += "Recall of think-needed samples: " +
         (m.recall_think_needed ? Fixed(100.0 * *m.recall_think_needed, 1)
                                : std::string("n/a")) +
         "\n";
  if (m.grounding) {
    std::vector<std::vector<std::string>> g = {
        {"R@0.3", "R@0.5", "R@0.7", "mIoU"},
        {Fixed(100.0 * m.grounding->recall_at[0], 1),
         Fixed(100.0 * m.grounding->recall_at[1], 1),
         Fixed(100.0 * m.grounding->recall_at[2], 1),
         Fixed(100.0 * m.grounding->miou, 1)}};
    out += AlignRows(g);
  }
  return out;
}

StrategyComparison CompareStrategies(std::span<const EvalRecord> direct,
                                     std::span<const EvalRecord> cot) {
  RequireNonEmpty(direct);
  RequireNonEmpty(cot);
  std::multiset<std::string> direct_ids;
  std::multiset<std::string> cot_ids;
  for (const EvalRecord& r : direct) direct_ids.insert(r.id);
  for (const EvalRecord& r : cot) cot_ids.insert(r.id);
  if (direct_ids != cot_ids) {
    throw Error(ErrorCode::kIdMismatch,
                "direct and CoT corpora do not share the same ids");
  }
  auto row = [](std::string name, std::span<const EvalRecord> records) {
    size_t correct = 0;
    for (const EvalRecord& r : records) {
      if (ChosenCorrect(r).value_or(false)) ++correct;
    }
    StrategyRow out;
    out.name = std::move(name);
    out.accuracy_pct = 100.0 * static_cast<double>(correct) /
                       static_cast<double>(records.size());
    out.mean_length = MeanLength(records);
    return out;
  };
  StrategyComparison cmp;
  cmp.direct = row("Direct", direct);
  cmp.cot = row("CoT", cot);
  cmp.accuracy_delta = cmp.cot.accuracy_pct - cmp.direct.accuracy_pct;
  cmp.length_delta = cmp.cot.mean_length - cmp.direct.mean_length;
  return cmp;
}

std::string FormatComparisonTable(const StrategyComparison& cmp) {
  return AlignRows({
      {"Strategy", "Acc", "Len"},
      {cmp.direct.name, Fixed(cmp.direct.accuracy_pct, 1),
       Fixed(cmp.direct.mean_length, 1)},
      {cmp.cot.name,
       Fixed(cmp.cot.accuracy_pct, 1) + " (" + Signed(cmp.accuracy_delta, 1) + ")",
       Fixed(cmp.cot.mean_length, 1) + " (" + Signed(cmp.length_delta, 1) + ")"},
  });
}

std::string ComparisonToJson(const StrategyComparison& cmp) {
  auto row = [](const StrategyRow& r) {
    return json{{"name", r.name},
                {"accuracy_pct", r.accuracy_pct},
                {"mean_length", r.mean_length}};
  };
  json out{{"direct", row(cmp.direct)},
           {"cot", row(cmp.cot)},
           {"accuracy_delta", cmp.accuracy_delta},
           {"length_delta", cmp.length_delta}};
  return out.dump(2);
}

}  // namespace autothink::metrics
