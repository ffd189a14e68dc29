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

#include "autothink/data_filter.h"

#include <istream>
#include <ostream>

#include "autothink/error.h"
#include "autothink/records.h"
#include "autothink/text.h"
#include "json.hpp"

namespace autothink {
namespace {

// Stand-in for the upstream ground-truth validity pass.
bool VerifiableQa(const QaTruth& qa) {
  if (text::Trim(qa.answer).empty()) return false;
  if (qa.kind == AnswerKind::kNumeric) return ParseNumeric(qa.answer).has_value();
  return true;
}

}  // namespace

std::string_view FilterVerdictName(FilterVerdict verdict) {
  switch (verdict) {
    case FilterVerdict::kKeep:
      return "keep";
    case FilterVerdict::kDropEasy:
      return "drop_easy";
    case FilterVerdict::kDropHard:
      return "drop_hard";
    case FilterVerdict::kDropInvalid:
      return "drop_invalid";
  }
  return "unknown";
}

FilterVerdict FilterSample(const SampleRecord& rec, size_t rollouts) {
  if (rec.task != TaskKind::kQa) return FilterVerdict::kKeep;
  const auto* qa = std::get_if<QaTruth>(&rec.ground_truth);
  if (qa == nullptr || !VerifiableQa(*qa)) return FilterVerdict::kDropInvalid;
  if (!rec.rollout_correct || rec.rollout_correct->size() != rollouts) {
    return FilterVerdict::kDropInvalid;
  }
  size_t correct = 0;
  for (bool label : *rec.rollout_correct) correct += label ? 1 : 0;
  if (correct == rollouts) return FilterVerdict::kDropEasy;
  if (correct == 0) return FilterVerdict::kDropHard;
  return FilterVerdict::kKeep;
}

void FilterReport::Add(FilterVerdict verdict) {
  switch (verdict) {
    case FilterVerdict::kKeep:
      ++kept;
      break;
    case FilterVerdict::kDropEasy:
      ++dropped_easy;
      break;
    case FilterVerdict::kDropHard:
      ++dropped_hard;
      break;
    case FilterVerdict::kDropInvalid:
      ++dropped_invalid;
      break;
  }
}

FilterReport& FilterReport::operator+=(const FilterReport& other) {
  if (other.rollouts != rollouts) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot merge reports with different rollout counts");
  }
  kept += other.kept;
  dropped_easy += other.dropped_easy;
  dropped_hard += other.dropped_hard;
  dropped_invalid += other.dropped_invalid;
  for (size_t k = 0; k < histogram.size(); ++k) histogram[k] += other.histogram[k];
  return *this;
}

std::string FilterReport::ToJson() const {
  nlohmann::json buckets = nlohmann::json::object();
  for (size_t k = 0; k < histogram.size(); ++k) {
    buckets[std::to_string(k) + "/" + std::to_string(rollouts)] = histogram[k];
  }
  nlohmann::json out{{"rollouts", rollouts},
                     {"input", total()},
                     {"kept", kept},
                     {"dropped_easy", dropped_easy},
                     {"dropped_hard", dropped_hard},
                     {"dropped_invalid", dropped_invalid},
                     {"histogram", histogram},
                     {"histogram_buckets", buckets}};
  return out.dump(2);
}

void AccumulateHistogram(const SampleRecord& rec, size_t rollouts,
                         std::vector<uint64_t>& histogram) {
  if (!rec.rollout_correct || rec.rollout_correct->size() != rollouts) return;
  if (histogram.size() != rollouts + 1) histogram.assign(rollouts + 1, 0);
  size_t correct = 0;
  for (bool label : *rec.rollout_correct) correct += label ? 1 : 0;
  ++histogram[correct];
}

std::vector<uint64_t> DifficultyHistogram(
    const std::vector<SampleRecord>& records, size_t rollouts) {
  std::vector<uint64_t> histogram(rollouts + 1, 0);
  for (const SampleRecord& rec : records) {
    AccumulateHistogram(rec, rollouts, histogram);
  }
  return histogram;
}

FilterReport FilterDataset(
    std::istream& in, std::ostream& out, const FilterOptions& options,
    const std::function<void(size_t, const std::string&)>& on_error) {
  if (options.rollouts < 1) {
    throw Error(ErrorCode::kInvalidConfig, "rollout count must be >= 1");
  }
  FilterReport report(options.rollouts);
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::Trim(line).empty()) continue;
    SampleRecord rec;
    try {
      rec = records::ParseSampleRecord(line);
    } catch (const Error& e) {
      if (options.strict) {
        throw Error(ErrorCode::kSchemaError,
                    "line " + std::to_string(line_number) + ": " + e.what());
      }
      if (on_error) on_error(line_number, e.what());
      report.Add(FilterVerdict::kDropInvalid);
      continue;
    }
    AccumulateHistogram(rec, options.rollouts, report.histogram);
    const FilterVerdict verdict = FilterSample(rec, options.rollouts);
    report.Add(verdict);
    if (verdict == FilterVerdict::kKeep) out << line << '\n';
  }
  return report;
}

}  // namespace autothink
