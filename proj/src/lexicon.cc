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

#include "adfar/lexicon.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "adfar/error.h"
#include "adfar/text.h"

namespace adfar {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r' || line[i] == '\n')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r' && line[j] != '\n') {
      ++j;
    }
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path);
  return in;
}

// Ordering used for every synonym ranking: similarity descending, then word.
bool RanksBefore(double sim_a, const std::string& a, double sim_b,
                 const std::string& b) {
  if (sim_a != sim_b) return sim_a > sim_b;
  return a < b;
}

double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// The stop-word list shipped as data/stopwords.txt; tests check they agree.
constexpr const char* kDefaultStopWords[] = {
    "a",         "about",    "above",   "after",     "again",   "against",
    "all",       "am",       "an",      "and",       "any",     "are",
    "as",        "at",       "be",      "because",   "been",    "before",
    "being",     "below",    "between", "both",      "but",     "by",
    "can",       "could",    "did",     "do",        "does",    "doing",
    "down",      "during",   "each",    "few",       "for",     "from",
    "further",   "had",      "has",     "have",      "having",  "he",
    "her",       "here",     "hers",    "herself",   "him",     "himself",
    "his",       "how",      "i",       "if",        "in",      "into",
    "is",        "it",       "its",     "itself",    "just",    "me",
    "more",      "most",     "my",      "myself",    "no",      "nor",
    "not",       "now",      "of",      "off",       "on",      "once",
    "only",      "or",       "other",   "our",       "ours",    "ourselves",
    "out",       "over",     "own",     "same",      "she",     "should",
    "so",        "some",     "such",    "than",      "that",    "the",
    "their",     "theirs",   "them",    "themselves", "then",   "there",
    "these",     "they",     "this",    "those",     "through", "to",
    "too",       "under",    "until",   "up",        "very",    "was",
    "we",        "were",     "what",    "when",      "where",   "which",
    "while",     "who",      "whom",    "why",       "will",    "with",
    "would",     "you",      "your",    "yours",     "yourself", "yourselves",
};

}  // namespace

void EmbeddingTable::Add(std::string_view word, std::span<const double> vector) {
  if (vector.empty()) throw Error("empty embedding vector for " + std::string(word));
  if (dim_ == 0) {
    dim_ = vector.size();
  } else if (vector.size() != dim_) {
    throw Error("embedding for " + std::string(word) + " has dimension " +
                std::to_string(vector.size()) + ", expected " +
                std::to_string(dim_));
  }
  std::string key = ToLower(word);
  if (index_.contains(key)) throw Error("duplicate embedding word: " + key);
  index_.emplace(key, words_.size());
  words_.push_back(std::move(key));
  values_.insert(values_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingTable::IndexOf(std::string_view word) const {
  auto it = index_.find(ToLower(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const double>> EmbeddingTable::Find(
    std::string_view word) const {
  auto index = IndexOf(word);
  if (!index) return std::nullopt;
  return VectorAt(*index);
}

void FrequencyTable::Add(std::string_view word, std::uint64_t count) {
  std::string key = ToLower(word);
  if (counts_.contains(key)) throw Error("duplicate frequency word: " + key);
  counts_.emplace(key, count);
  entries_.emplace_back(std::move(key), count);
}

std::optional<std::uint64_t> FrequencyTable::Find(std::string_view word) const {
  auto it = counts_.find(ToLower(word));
  if (it == counts_.end()) return std::nullopt;
  return it->second;
}

StopWordList::StopWordList(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(ToLower(w));
}

bool StopWordList::Contains(std::string_view word) const {
  return words_.contains(ToLower(word));
}

std::vector<std::string> StopWordList::DefaultWords() {
  return {std::begin(kDefaultStopWords), std::end(kDefaultStopWords)};
}

StopWordList StopWordList::Default() { return StopWordList(DefaultWords()); }

EmbeddingTable ParseEmbeddings(std::istream& in, const std::string& source) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError(source, line_no, "missing vector");
    values.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double x = 0.0;
      const char* first = fields[i].data();
      const char* last = first + fields[i].size();
      auto [ptr, ec] = std::from_chars(first, last, x);
      if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
        throw ParseError(source, line_no,
                         "bad number '" + std::string(fields[i]) + "'");
      }
      values.push_back(x);
    }
    if (!table.empty() && values.size() != table.dim()) {
      throw ParseError(source, line_no,
                       "dimension " + std::to_string(values.size()) +
                           " differs from " + std::to_string(table.dim()));
    }
    try {
      table.Add(fields[0], values);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return table;
}

FrequencyTable ParseFrequencies(std::istream& in, const std::string& source) {
  FrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw ParseError(source, line_no, "expected 'word count'");
    }
    std::uint64_t count = 0;
    const char* first = fields[1].data();
    const char* last = first + fields[1].size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(source, line_no,
                       "bad count '" + std::string(fields[1]) + "'");
    }
    try {
      table.Add(fields[0], count);
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return table;
}

StopWordList ParseStopWords(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    for (auto f : SplitFields(line)) words.emplace_back(f);
  }
  return StopWordList(words);
}

EmbeddingTable LoadEmbeddings(const std::string& path) {
  auto in = OpenOrThrow(path);
  return ParseEmbeddings(in, path);
}

FrequencyTable LoadFrequencies(const std::string& path) {
  auto in = OpenOrThrow(path);
  return ParseFrequencies(in, path);
}

StopWordList LoadStopWords(const std::string& path) {
  auto in = OpenOrThrow(path);
  return ParseStopWords(in);
}

double CosineSimilarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("cosine similarity of unequal lengths");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw DegenerateVectorError();
  return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

std::vector<SynonymEntry> TopSynonyms(std::string_view word, std::size_t k,
                                      const EmbeddingTable& table,
                                      const FrequencyTable& freqs) {
  auto query_index = table.IndexOf(word);
  if (!query_index) throw AbsentWordError(std::string(word));
  if (k == 0) return {};
  auto query = table.VectorAt(*query_index);
  if (SquaredNorm(query) == 0.0) throw DegenerateVectorError();

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i == *query_index) continue;
    auto v = table.VectorAt(i);
    if (SquaredNorm(v) == 0.0) continue;
    scored.emplace_back(CosineSimilarity(query, v), i);
  }
  const auto& words = table.words();
  auto before = [&](const auto& a, const auto& b) {
    return RanksBefore(a.first, words[a.second], b.first, words[b.second]);
  };
  std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), before);

  std::vector<SynonymEntry> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const auto& w = words[scored[i].second];
    out.push_back({w, scored[i].first, freqs.Count(w)});
  }
  return out;
}

bool IsRare(std::string_view word, const FrequencyTable& freqs,
            std::uint64_t f_thres) {
  return freqs.Count(word) < f_thres;
}

SynonymIndex::SynonymIndex(const EmbeddingTable& table, std::size_t depth)
    : depth_(depth), lists_(table.size()) {
  const std::size_t n = table.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = SquaredNorm(table.VectorAt(i));

  const auto& words = table.words();
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) continue;
    scored.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || norms[j] == 0.0) continue;
      scored.emplace_back(
          CosineSimilarity(table.VectorAt(i), table.VectorAt(j)), j);
    }
    std::size_t keep = std::min(depth, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                      [&](const auto& a, const auto& b) {
                        return RanksBefore(a.first, words[a.second], b.first,
                                           words[b.second]);
                      });
    auto& list = lists_[i];
    list.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r) {
      list.emplace_back(scored[r].second, scored[r].first);
    }
  }
}

Lexicon::Lexicon(EmbeddingTable embeddings, FrequencyTable frequencies,
                 StopWordList stop_words)
    : embeddings_(std::move(embeddings)),
      frequencies_(std::move(frequencies)),
      stop_words_(std::move(stop_words)) {
  counts_.reserve(embeddings_.size());
  for (const auto& w : embeddings_.words()) counts_.push_back(frequencies_.Count(w));
}

std::vector<SynonymEntry> Lexicon::Synonyms(std::string_view word,
                                            std::size_t k) const {
  if (!index_ || k > index_->depth()) {
    return TopSynonyms(word, k, embeddings_, frequencies_);
  }
  auto query = embeddings_.IndexOf(word);
  if (!query) throw AbsentWordError(std::string(word));
  if (k == 0) return {};
  if (SquaredNorm(embeddings_.VectorAt(*query)) == 0.0) {
    throw DegenerateVectorError();
  }
  const auto& list = index_->Neighbours(*query);
  std::vector<SynonymEntry> out;
  out.reserve(std::min(k, list.size()));
  for (std::size_t r = 0; r < list.size() && r < k; ++r) {
    const auto& w = embeddings_.words()[list[r].first];
    out.push_back({w, list[r].second, counts_[list[r].first]});
  }
  return out;
}

void Lexicon::BuildSynonymIndex(std::size_t depth) {
  index_.emplace(embeddings_, depth);
}

}  // namespace adfar
