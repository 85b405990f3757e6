// Copyright 2026 The ADFAR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ADFAR_TEXT_H_
#define ADFAR_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace adfar {

// A word-tokenized sentence. `raw` keeps the text the tokens came from;
// sentences built by substitution carry the detokenized form.
struct Sentence {
  std::vector<std::string> tokens;
  std::string raw;

  bool operator==(const Sentence&) const = default;
};

// Tokenization rule:
//   1. split on ASCII whitespace;
//   2. from each chunk, peel leading and trailing ASCII punctuation
//      characters off as one-character tokens;
//   3. the remaining core is one token, internal punctuation included.
// So "it's fine." -> [it's, fine, .] and "(great)" -> [(, great, )].
Sentence Tokenize(std::string_view text);

// Joins tokens with single spaces.
std::string Detokenize(const std::vector<std::string>& tokens);

Sentence FromTokens(std::vector<std::string> tokens);

// True when every byte of the token is ASCII punctuation. Punctuation tokens
// are never substitution or attack candidates.
bool IsPunctuation(std::string_view token);

std::string ToLower(std::string_view s);

}  // namespace adfar

#endif  // ADFAR_TEXT_H_
