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

#ifndef AUTOTHINK_DATA_FILTER_H_
#define AUTOTHINK_DATA_FILTER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autothink/reward.h"

namespace autothink {

inline constexpr size_t kDefaultRollouts = 8;

struct SampleRecord {
  std::string id;
  TaskKind task = TaskKind::kQa;
  std::string question;
  GroundTruth ground_truth;
  std::optional<std::vector<bool>> rollout_correct;
};

enum class FilterVerdict { kKeep, kDropEasy, kDropHard, kDropInvalid };
std::string_view FilterVerdictName(FilterVerdict verdict);

// Grounding tasks are always kept. QA records need exactly `rollouts` labels
// and a verifiable answer (non-empty; numeric answers must parse); they are
// kept iff 0 < (number correct) < rollouts.
FilterVerdict FilterSample(const SampleRecord& rec, size_t rollouts);

struct FilterReport {
  size_t rollouts = kDefaultRollouts;
  uint64_t kept = 0;
  uint64_t dropped_easy = 0;
  uint64_t dropped_hard = 0;
  uint64_t dropped_invalid = 0;
  // histogram[k] counts records with exactly k correct of `rollouts` labels.
  std::vector<uint64_t> histogram;

  explicit FilterReport(size_t r = kDefaultRollouts)
      : rollouts(r), histogram(r + 1, 0) {}

  uint64_t total() const {
    return kept + dropped_easy + dropped_hard + dropped_invalid;
  }
  void Add(FilterVerdict verdict);
  // Additive merge of a report computed on another shard.
  FilterReport& operator+=(const FilterReport& other);

  std::string ToJson() const;
};

// Accumulates one record's labels into `histogram` when it carries exactly
// `rollouts` of them; other records are skipped.
void AccumulateHistogram(const SampleRecord& rec, size_t rollouts,
                         std::vector<uint64_t>& histogram);

std::vector<uint64_t> DifficultyHistogram(
    const std::vector<SampleRecord>& records, size_t rollouts);

struct FilterOptions {
  size_t rollouts = kDefaultRollouts;
  // Fail fast on the first malformed line instead of counting it.
  bool strict = false;
};

// Reads SampleRecord JSONL from `in`, writes kept lines verbatim (in input
// order) to `out`. Malformed lines count as dropped_invalid and are reported
// through `on_error(line_number, message)` when provided; in strict mode the
// first one throws Error(kSchemaError) instead. Blank lines are ignored.
FilterReport FilterDataset(
    std::istream& in, std::ostream& out, const FilterOptions& options,
    const std::function<void(size_t, const std::string&)>& on_error = {});

}  // namespace autothink

#endif  // AUTOTHINK_DATA_FILTER_H_
