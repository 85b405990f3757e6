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

#ifndef ADFAR_RANDOMIZER_H_
#define ADFAR_RANDOMIZER_H_

// Frequency-aware randomization of a tokenized sentence.
//
// A sentence of n word tokens (punctuation excluded) gets a substitution
// budget m = round_half_up(n * r). Every rare word (frequency < f_thres) is a
// candidate; when there are fewer than m of them the remaining m - n_rare
// candidates are drawn uniformly without replacement from the other word
// positions. Stop words are then dropped from the candidate set. Each
// surviving candidate is replaced by a uniform draw from its synonym set:
// the n_s nearest embedding neighbours, narrowed to the n_f most frequent of
// them when frequency_aware is set.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adfar/lexicon.h"
#include "adfar/random.h"
#include "adfar/text.h"

namespace adfar {

struct RandomizerConfig {
  double r = 0.30;
  std::uint64_t f_thres = 200;
  std::size_t n_s = 20;
  std::size_t n_f = 10;
  bool frequency_aware = true;
  std::uint64_t seed = 0;

  // Throws ConfigError unless 0 <= r <= 1, n_s >= 1 and 1 <= n_f <= n_s.
  void Validate() const;
};

enum class PerturbReason { kRare, kRandom };
enum class SkipReason { kStopword, kNoEmbedding, kEmptySynonymSet };

struct PerturbationRecord {
  std::size_t position = 0;
  std::string original;
  std::string replacement;  // equals original when skipped
  PerturbReason reason = PerturbReason::kRandom;
  std::optional<SkipReason> skipped;

  bool operator==(const PerturbationRecord&) const = default;
};

struct CandidateSet {
  std::vector<std::size_t> positions;  // ascending, stop words removed
  std::vector<std::size_t> rare;       // ascending rare positions (pre-filter)
  std::vector<std::size_t> filtered_stopwords;  // ascending
  std::size_t word_count = 0;                   // n
  std::size_t target = 0;                       // round_half_up(n * r)
};

// round(n * r) with halves rounded up.
std::size_t SubstitutionBudget(std::size_t word_count, double r);

CandidateSet SelectCandidates(const Sentence& sentence,
                              const RandomizerConfig& config,
                              const Lexicon& lexicon, Rng& rng);

// Empty when the word has no (or a zero) embedding.
std::vector<SynonymEntry> BuildSynonymSet(const std::string& word,
                                          const RandomizerConfig& config,
                                          const Lexicon& lexicon);

struct RandomizedSentence {
  Sentence sentence;
  std::vector<PerturbationRecord> records;
};

RandomizedSentence Randomize(const Sentence& sentence,
                             const RandomizerConfig& config,
                             const Lexicon& lexicon, Rng& rng);

// One tab-separated line per record:
//   position  original  replacement  reason  skipped
// with reason in {rare, random} and skipped in {-, stopword, no-embedding,
// empty-synonym-set}.
std::string FormatRecord(const PerturbationRecord& record);
PerturbationRecord ParseRecord(const std::string& line);
void WriteRecords(std::ostream& out,
                  const std::vector<PerturbationRecord>& records);

}  // namespace adfar

#endif  // ADFAR_RANDOMIZER_H_
