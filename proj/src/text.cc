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

#include "adfar/text.h"

#include <cctype>

namespace adfar {
namespace {

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool IsPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

void SplitChunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && IsPunct(chunk[begin])) {
    out.emplace_back(1, chunk[begin]);
    ++begin;
  }
  std::vector<std::string> trailing;
  while (end > begin && IsPunct(chunk[end - 1])) {
    trailing.emplace_back(1, chunk[end - 1]);
    --end;
  }
  if (end > begin) out.emplace_back(chunk.substr(begin, end - begin));
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

Sentence Tokenize(std::string_view text) {
  Sentence s;
  s.raw = std::string(text);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !IsSpace(text[j])) ++j;
    if (j > i) SplitChunk(text.substr(i, j - i), s.tokens);
    i = j;
  }
  return s;
}

std::string Detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Sentence FromTokens(std::vector<std::string> tokens) {
  Sentence s;
  s.raw = Detokenize(tokens);
  s.tokens = std::move(tokens);
  return s;
}

bool IsPunctuation(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (!IsPunct(c)) return false;
  }
  return true;
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace adfar
