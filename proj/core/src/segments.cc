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

#include "autothink/segments.h"

#include <algorithm>
#include <cmath>
#include <regex>
#include <string>

#include "json.hpp"

namespace autothink {
namespace {

using nlohmann::json;

std::optional<Segment> PairFromJson(const json& pair) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
      !pair[1].is_number()) {
    return std::nullopt;
  }
  Segment s{pair[0].get<double>(), pair[1].get<double>()};
  if (!s.valid()) return std::nullopt;
  return s;
}

bool ParseJsonSegments(std::string_view text, SegmentParse& out) {
  const size_t open = text.find('[');
  const size_t close = text.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    return false;
  }
  json doc = json::parse(text.substr(open, close - open + 1), nullptr,
                         /*allow_exceptions=*/false);
  if (!doc.is_array() || doc.empty()) return false;

  std::vector<Segment> segments;
  if (doc[0].is_number()) {
    if (auto s = PairFromJson(doc)) segments.push_back(*s);
  } else {
    for (const json& item : doc) {
      if (auto s = PairFromJson(item)) segments.push_back(*s);
    }
  }
  if (segments.empty()) return false;
  out.format = SegmentFormat::kJsonArray;
  out.segments = std::move(segments);
  out.consumed = {{open, close + 1}};
  return true;
}

bool ParseRegexSegments(std::string_view text, const std::regex& pattern,
                        SegmentFormat format, SegmentParse& out) {
  const std::string owned(text);
  std::vector<Segment> segments;
  std::vector<Interval> consumed;
  for (auto it = std::sregex_iterator(owned.begin(), owned.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    Segment s{std::stod(m[1].str()), std::stod(m[2].str())};
    if (!s.valid()) continue;
    segments.push_back(s);
    const auto begin = static_cast<size_t>(m.position(0));
    consumed.push_back({begin, begin + static_cast<size_t>(m.length(0))});
  }
  if (segments.empty()) return false;
  out.format = format;
  out.segments = std::move(segments);
  out.consumed = std::move(consumed);
  return true;
}

const std::regex& FromToPattern() {
  static const std::regex pattern(
      R"(from\s+(\d+(?:\.\d+)?)\s*(?:s|sec|secs|seconds)?\s+to\s+(\d+(?:\.\d+)?)(?:\s*(?:seconds|secs|sec|s)\b)?)",
      std::regex::icase | std::regex::ECMAScript);
  return pattern;
}

const std::regex& RangePattern() {
  static const std::regex pattern(
      R"((\d+(?:\.\d+)?)\s*(?:s|sec|secs|seconds)?\s*(?:-|to)\s*(\d+(?:\.\d+)?)(?:\s*(?:seconds|secs|sec|s)\b)?)",
      std::regex::icase | std::regex::ECMAScript);
  return pattern;
}

}  // namespace

bool Segment::valid() const {
  return std::isfinite(start) && std::isfinite(end) && start >= 0.0 &&
         start < end;
}

double Tiou(const Segment& a, const Segment& b) {
  const double inter =
      std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = (a.end - a.start) + (b.end - b.start) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double BestPairTiou(std::span<const Segment> predicted,
                    std::span<const Segment> truth) {
  double best = 0.0;
  for (const Segment& p : predicted) {
    for (const Segment& t : truth) best = std::max(best, Tiou(p, t));
  }
  return best;
}

SegmentParse ParseSegments(std::string_view text) {
  SegmentParse out;
  if (ParseJsonSegments(text, out)) return out;
  if (ParseRegexSegments(text, FromToPattern(), SegmentFormat::kFromTo, out))
    return out;
  if (ParseRegexSegments(text, RangePattern(), SegmentFormat::kRange, out))
    return out;
  return {};
}

}  // namespace autothink
