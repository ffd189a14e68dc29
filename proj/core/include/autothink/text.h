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

#ifndef AUTOTHINK_TEXT_H_
#define AUTOTHINK_TEXT_H_

#include <string>
#include <string_view>

// Small ASCII string helpers shared by the grammar, reward and router code.
namespace autothink::text {

bool IsSpace(char c);
bool IsPunct(char c);
char ToLower(char c);

std::string_view Trim(std::string_view s);

// Trim, collapse internal whitespace runs to one space, ASCII case-fold.
std::string CollapseAndFold(std::string_view s);

// Normalization used for fallback-string matching: CollapseAndFold, then
// strip a single trailing period.
std::string NormalizeFallback(std::string_view s);

// Normalization used for free-text QA answers: CollapseAndFold, then strip
// leading and trailing ASCII punctuation (and any whitespace it exposes).
std::string NormalizeAnswerText(std::string_view s);

}  // namespace autothink::text

#endif  // AUTOTHINK_TEXT_H_
