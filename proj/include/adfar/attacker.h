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

#ifndef ADFAR_ATTACKER_H_
#define ADFAR_ATTACKER_H_

// Greedy adversarial word substitution in the style of TextFooler.
//
// Tokens are ranked by how much the gold-class probability drops when they
// are removed (deletion mode) or replaced by an unknown-word placeholder
// (saliency mode, a cheap stand-in for PWWS's saliency weighting). Each
// ranked position is then tried with every embedding neighbour above a
// similarity floor, and the substitution that lowers p_gold the most is kept
// if it lowers it at all. The attack stops as soon as the argmax leaves the
// gold class or the perturbation budget is spent.
//
// Neither importance formula is the exact one from the published attacks;
// there is no part-of-speech or sentence-encoder filter either.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adfar/classifier.h"
#include "adfar/lexicon.h"
#include "adfar/text.h"

namespace adfar {

// Anything that maps a sentence to class probabilities. Randomized victims
// may change state between calls, hence non-const.
class Victim {
 public:
  virtual ~Victim() = default;
  virtual Eigen::VectorXd Probabilities(const Sentence& sentence) = 0;
};

// Eval-mode classification head of a trained model.
class ClassifierVictim : public Victim {
 public:
  explicit ClassifierVictim(const DualHeadParams& params) : params_(params) {}
  Eigen::VectorXd Probabilities(const Sentence& sentence) override;

 private:
  const DualHeadParams& params_;
};

enum class ImportanceMode { kDeletion, kSaliency };

struct AttackConfig {
  ImportanceMode importance_mode = ImportanceMode::kDeletion;
  std::size_t max_candidates_per_token = 20;
  double min_synonym_similarity = 0.6;
  double max_perturb_fraction = 0.4;
  std::uint64_t seed = 0;

  // Throws ConfigError for out-of-range thresholds.
  void Validate() const;
};

// Stand-in token for saliency mode; never present in a lexicon.
inline constexpr const char* kUnknownPlaceholder = "<unk>";

struct ImportanceScore {
  std::size_t position = 0;
  double score = 0.0;  // -inf for stop words and punctuation
};

// Sorted by descending score, ties by position. `queries`, when given, is
// incremented once per victim call.
std::vector<ImportanceScore> TokenImportance(const Sentence& sentence,
                                             Victim& victim, std::size_t gold,
                                             ImportanceMode mode,
                                             const StopWordList& stop_words,
                                             std::size_t* queries = nullptr);

std::vector<std::string> CandidateSubstitutes(const std::string& token,
                                              const Lexicon& lexicon,
                                              const AttackConfig& config);

struct Substitution {
  std::size_t position = 0;
  std::string original;
  std::string replacement;
  double p_gold_before = 0.0;
  double p_gold_after = 0.0;

  bool operator==(const Substitution&) const = default;
};

struct AttackResult {
  bool success = false;
  Sentence adversarial;
  std::vector<Substitution> substitutions;
  std::size_t queries = 0;
  std::size_t original_label = 0;  // the gold label the attack moves away from
  std::size_t final_label = 0;     // victim argmax on `adversarial`
  std::size_t word_count = 0;

  bool operator==(const AttackResult&) const = default;
};

// floor(max_perturb_fraction * n) for n word tokens.
std::size_t PerturbationBudget(std::size_t word_count, double fraction);

AttackResult Attack(const Sentence& sentence, std::size_t gold, Victim& victim,
                    const Lexicon& lexicon, const AttackConfig& config);

// One JSON object per line.
std::string AttackResultToJsonLine(const AttackResult& result);
AttackResult AttackResultFromJsonLine(const std::string& line);

}  // namespace adfar

#endif  // ADFAR_ATTACKER_H_
