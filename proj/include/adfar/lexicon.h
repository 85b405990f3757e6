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

#ifndef ADFAR_LEXICON_H_
#define ADFAR_LEXICON_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace adfar {

// Word vectors keyed by lowercased word. All vectors share one dimension,
// fixed by the first insertion (dim() is 0 while the table is empty).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  // Throws Error on a duplicate word or a dimension mismatch.
  void Add(std::string_view word, std::span<const double> vector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  std::optional<std::span<const double>> Find(std::string_view word) const;
  std::optional<std::size_t> IndexOf(std::string_view word) const;
  bool Contains(std::string_view word) const { return IndexOf(word).has_value(); }

  // Words in insertion order; positions match VectorAt().
  const std::vector<std::string>& words() const { return words_; }
  std::span<const double> VectorAt(std::size_t index) const {
    return {values_.data() + index * dim_, dim_};
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Corpus frequency counts. Absent words are distinguishable from count 0.
class FrequencyTable {
 public:
  // Throws Error on a duplicate word.
  void Add(std::string_view word, std::uint64_t count);

  std::optional<std::uint64_t> Find(std::string_view word) const;
  // Absent words count as 0.
  std::uint64_t Count(std::string_view word) const {
    return Find(word).value_or(0);
  }
  std::size_t size() const { return counts_.size(); }
  const std::vector<std::pair<std::string, std::uint64_t>>& entries() const {
    return entries_;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::vector<std::pair<std::string, std::uint64_t>> entries_;
};

class StopWordList {
 public:
  StopWordList() = default;
  explicit StopWordList(const std::vector<std::string>& words);

  bool Contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

  // The list shipped in data/stopwords.txt.
  static StopWordList Default();
  static std::vector<std::string> DefaultWords();

 private:
  std::unordered_set<std::string> words_;
};

struct SynonymEntry {
  std::string word;
  double similarity = 0.0;
  std::uint64_t frequency = 0;

  bool operator==(const SynonymEntry&) const = default;
};

EmbeddingTable ParseEmbeddings(std::istream& in, const std::string& source);
FrequencyTable ParseFrequencies(std::istream& in, const std::string& source);
StopWordList ParseStopWords(std::istream& in);

EmbeddingTable LoadEmbeddings(const std::string& path);
FrequencyTable LoadFrequencies(const std::string& path);
StopWordList LoadStopWords(const std::string& path);

// u.v / (|u| |v|), clamped to [-1, 1]. Computed as dot / sqrt(uu * vv) so
// that a vector compared with itself gives exactly 1. Throws
// DegenerateVectorError for a zero-norm input.
double CosineSimilarity(std::span<const double> u, std::span<const double> v);

// Exact linear scan: the k words most cosine-similar to `word`, excluding the
// word itself, by descending similarity with ties in lexicographic order.
// Vocabulary words with zero-norm vectors are skipped. Throws AbsentWordError
// if `word` has no embedding.
std::vector<SynonymEntry> TopSynonyms(std::string_view word, std::size_t k,
                                      const EmbeddingTable& table,
                                      const FrequencyTable& freqs);

// True iff frequency(word) < f_thres; absent words have frequency 0.
bool IsRare(std::string_view word, const FrequencyTable& freqs,
            std::uint64_t f_thres);

// Precomputed top-`depth` neighbour lists for every vocabulary word. Returns
// the same lists as TopSynonyms for any k <= depth.
class SynonymIndex {
 public:
  SynonymIndex(const EmbeddingTable& table, std::size_t depth);

  std::size_t depth() const { return depth_; }
  // Neighbour (word index, similarity) pairs for the word at `index`.
  const std::vector<std::pair<std::size_t, double>>& Neighbours(
      std::size_t index) const {
    return lists_[index];
  }

 private:
  std::size_t depth_;
  std::vector<std::vector<std::pair<std::size_t, double>>> lists_;
};

// The lexicon resources shared by the randomizer, the attacker and the
// classifier. Immutable once built.
class Lexicon {
 public:
  Lexicon(EmbeddingTable embeddings, FrequencyTable frequencies,
          StopWordList stop_words);

  const EmbeddingTable& embeddings() const { return embeddings_; }
  const FrequencyTable& frequencies() const { return frequencies_; }
  const StopWordList& stop_words() const { return stop_words_; }

  // Serves TopSynonyms from the index when it is deep enough, otherwise scans.
  std::vector<SynonymEntry> Synonyms(std::string_view word,
                                     std::size_t k) const;

  void BuildSynonymIndex(std::size_t depth);
  bool has_index() const { return index_.has_value(); }

 private:
  EmbeddingTable embeddings_;
  FrequencyTable frequencies_;
  StopWordList stop_words_;
  std::optional<SynonymIndex> index_;
  std::vector<std::uint64_t> counts_;  // frequency of each embedding word
};

}  // namespace adfar

#endif  // ADFAR_LEXICON_H_
