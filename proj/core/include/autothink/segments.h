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

#ifndef AUTOTHINK_SEGMENTS_H_
#define AUTOTHINK_SEGMENTS_H_

#include <span>
#include <string_view>
#include <vector>

#include "autothink/grammar.h"

namespace autothink {

// A time interval in seconds.
struct Segment {
  double start = 0.0;
  double end = 0.0;

  bool valid() const;  // finite, 0 <= start < end
  friend bool operator==(const Segment&, const Segment&) = default;
};

// Temporal IoU of two valid segments: intersection length / union length.
double Tiou(const Segment& a, const Segment& b);

// Largest tIoU over all (predicted, truth) pairs; 0 when either side is empty.
double BestPairTiou(std::span<const Segment> predicted,
                    std::span<const Segment> truth);

enum class SegmentFormat { kNone, kJsonArray, kFromTo, kRange };

struct SegmentParse {
  SegmentFormat format = SegmentFormat::kNone;
  std::vector<Segment> segments;
  // Character ranges of `text` consumed by the winning format, so a caller can
  // recover the non-temporal remainder of a grounding-QA answer.
  std::vector<Interval> consumed;
};

// Tries, in order: a JSON array of [start, end] pairs (or one bare pair), the
// phrase "from X to Y" with optional "seconds", then "X - Y" / "X to Y". The
// first format yielding at least one valid segment wins.
SegmentParse ParseSegments(std::string_view text);

}  // namespace autothink

#endif  // AUTOTHINK_SEGMENTS_H_
