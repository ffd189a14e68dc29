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

#ifndef AUTOTHINK_METRICS_H_
#define AUTOTHINK_METRICS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autothink/reward.h"
#include "autothink/router.h"
#include "autothink/segments.h"

namespace autothink::metrics {

struct EvalRecord {
  std::string id;
  TaskKind task = TaskKind::kQa;
  std::string benchmark;  // empty when the corpus is a single benchmark
  std::optional<bool> correct_first;
  std::optional<bool> correct_second;
  RouteAction action = RouteAction::kContinue;
  std::optional<uint64_t> response_tokens;
  std::optional<std::string> response;  // used for length when tokens absent
  std::optional<std::vector<Segment>> pred_segments;
  std::optional<std::string> pred_answer;  // parsed for segments if needed
  std::optional<std::vector<Segment>> truth_segments;
};

inline constexpr std::array<double, 3> kRecallThresholds = {0.3, 0.5, 0.7};

// Tokens as supplied, else whitespace-delimited words of `response`, else 0.
uint64_t ResponseLength(const EvalRecord& rec);

// Correctness of the answer the router actually returned: a1 on EarlyExit,
// a2 on Continue.
std::optional<bool> ChosenCorrect(const EvalRecord& rec);

// Fraction of records routed to Continue. Throws Error(kEmptyCorpus).
double ThinkRatio(std::span<const EvalRecord> records);

// Among records with a1 wrong and a2 right, the fraction routed to Continue;
// nullopt when there are none.
std::optional<double> RecallThinkNeeded(std::span<const EvalRecord> records);

// Fraction of records whose chosen answer is correct, over the records where
// that is known; nullopt when none are. Throws Error(kEmptyCorpus).
std::optional<double> Accuracy(std::span<const EvalRecord> records);

// Mean ResponseLength. Throws Error(kEmptyCorpus).
double MeanLength(std::span<const EvalRecord> records);

struct GroundingMetrics {
  size_t count = 0;
  std::array<double, 3> recall_at = {0.0, 0.0, 0.0};  // kRecallThresholds
  double miou = 0.0;
};

// Best-pair tIoU of one record; unparsable or missing predictions give 0.
double RecordTiou(const EvalRecord& rec);

// Over records carrying truth segments; nullopt if there are none.
std::optional<GroundingMetrics> ComputeGroundingMetrics(
    std::span<const EvalRecord> records);

struct SliceMetrics {
  size_t count = 0;
  std::optional<double> accuracy;
  double mean_length = 0.0;
  double think_ratio = 0.0;
};

struct EvalMetrics {
  SliceMetrics pooled;
  std::optional<double> recall_think_needed;
  std::optional<GroundingMetrics> grounding;
  std::map<std::string, SliceMetrics> per_benchmark;
  // Unweighted mean of per-benchmark mean lengths.
  double macro_mean_length = 0.0;
};

// Throws Error(kEmptyCorpus).
EvalMetrics Evaluate(std::span<const EvalRecord> records);

std::string MetricsToJson(const EvalMetrics& metrics);
// Aligned plain-text table, one row per benchmark plus an overall row.
std::string FormatMetricsTable(const EvalMetrics& metrics);

struct StrategyRow {
  std::string name;
  double accuracy_pct = 0.0;
  double mean_length = 0.0;
};

struct StrategyComparison {
  StrategyRow direct;
  StrategyRow cot;
  double accuracy_delta = 0.0;  // cot - direct, percentage points
  double length_delta = 0.0;    // cot - direct, tokens
};

// Both corpora must contain the same ids (Error(kIdMismatch) otherwise).
// Accuracy counts unknown correctness as wrong so both rows share a
// denominator.
StrategyComparison CompareStrategies(std::span<const EvalRecord> direct,
                                     std::span<const EvalRecord> cot);

// Rows like "CoT  63.0 (+1.0)  149.0 (+146.5)".
std::string FormatComparisonTable(const StrategyComparison& cmp);
std::string ComparisonToJson(const StrategyComparison& cmp);

}  // namespace autothink::metrics

#endif  // AUTOTHINK_METRICS_H_
