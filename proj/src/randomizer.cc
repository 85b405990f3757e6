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

#include "adfar/randomizer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "adfar/error.h"

namespace adfar {
namespace {

const char* ReasonName(PerturbReason r) {
  return r == PerturbReason::kRare ? "rare" : "random";
}

const char* SkipName(const std::optional<SkipReason>& s) {
  if (!s) return "-";
  switch (*s) {
    case SkipReason::kStopword:
      return "stopword";
    case SkipReason::kNoEmbedding:
      return "no-embedding";
    case SkipReason::kEmptySynonymSet:
      return "empty-synonym-set";
  }
  return "-";
}

bool HasUsableEmbedding(const std::string& word, const Lexicon& lexicon) {
  auto v = lexicon.embeddings().Find(word);
  if (!v) return false;
  return std::any_of(v->begin(), v->end(), [](double x) { return x != 0.0; });
}

}  // namespace

void RandomizerConfig::Validate() const {
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("r must lie in [0, 1]");
  if (n_s == 0) throw ConfigError("n_s must be positive");
  if (n_f == 0 || n_f > n_s) throw ConfigError("n_f must lie in [1, n_s]");
}

std::size_t SubstitutionBudget(std::size_t word_count, double r) {
  // The epsilon keeps products like 5 * 0.3 on the intended side of .5.
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(word_count) * r + 0.5 + 1e-9));
}

CandidateSet SelectCandidates(const Sentence& sentence,
                              const RandomizerConfig& config,
                              const Lexicon& lexicon, Rng& rng) {
  CandidateSet out;
  std::vector<std::size_t> common;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const auto& tok = sentence.tokens[i];
    if (IsPunctuation(tok)) continue;
    ++out.word_count;
    if (IsRare(tok, lexicon.frequencies(), config.f_thres)) {
      out.rare.push_back(i);
    } else {
      common.push_back(i);
    }
  }
  out.target = SubstitutionBudget(out.word_count, config.r);

  std::vector<std::size_t> selected = out.rare;
  // With more rare words than the budget allows, the random draw is empty.
  std::size_t extra = out.target > out.rare.size()
                          ? out.target - out.rare.size()
                          : 0;
  extra = std::min(extra, common.size());
  for (std::size_t k = 0; k < extra; ++k) {
    std::size_t j = k + UniformIndex(rng, common.size() - k);
    std::swap(common[k], common[j]);
    selected.push_back(common[k]);
  }
  std::sort(selected.begin(), selected.end());

  for (std::size_t pos : selected) {
    if (lexicon.stop_words().Contains(sentence.tokens[pos])) {
      out.filtered_stopwords.push_back(pos);
    } else {
      out.positions.push_back(pos);
    }
  }
  return out;
}

std::vector<SynonymEntry> BuildSynonymSet(const std::string& word,
                                          const RandomizerConfig& config,
                                          const Lexicon& lexicon) {
  if (!HasUsableEmbedding(word, lexicon)) return {};
  auto pool = lexicon.Synonyms(word, config.n_s);
  if (!config.frequency_aware) return pool;
  // Words are unique, so this is a total order.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(config.n_f, pool.size());
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](std::size_t i, std::size_t j) {
                      const auto& a = pool[i];
                      const auto& b = pool[j];
                      if (a.frequency != b.frequency) {
                        return a.frequency > b.frequency;
                      }
                      if (a.similarity != b.similarity) {
                        return a.similarity > b.similarity;
                      }
                      return a.word < b.word;
                    });
  std::vector<SynonymEntry> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(pool[order[i]]));
  return out;
}

RandomizedSentence Randomize(const Sentence& sentence,
                             const RandomizerConfig& config,
                             const Lexicon& lexicon, Rng& rng) {
  CandidateSet candidates = SelectCandidates(sentence, config, lexicon, rng);
  RandomizedSentence out;
  out.sentence.tokens = sentence.tokens;

  auto reason_for = [&](std::size_t pos) {
    return std::binary_search(candidates.rare.begin(), candidates.rare.end(),
                              pos)
               ? PerturbReason::kRare
               : PerturbReason::kRandom;
  };

  // Records come out in position order, stop-word skips interleaved.
  std::vector<std::size_t> all = candidates.positions;
  all.insert(all.end(), candidates.filtered_stopwords.begin(),
             candidates.filtered_stopwords.end());
  std::sort(all.begin(), all.end());

  for (std::size_t pos : all) {
    const std::string& original = sentence.tokens[pos];
    PerturbationRecord rec{pos, original, original, reason_for(pos),
                           std::nullopt};
    if (std::binary_search(candidates.filtered_stopwords.begin(),
                           candidates.filtered_stopwords.end(), pos)) {
      rec.skipped = SkipReason::kStopword;
    } else if (!HasUsableEmbedding(original, lexicon)) {
      rec.skipped = SkipReason::kNoEmbedding;
    } else {
      auto synonyms = BuildSynonymSet(original, config, lexicon);
      if (synonyms.empty()) {
        rec.skipped = SkipReason::kEmptySynonymSet;
      } else {
        rec.replacement = synonyms[UniformIndex(rng, synonyms.size())].word;
        out.sentence.tokens[pos] = rec.replacement;
      }
    }
    out.records.push_back(std::move(rec));
  }
  out.sentence.raw = out.records.empty() ? sentence.raw
                                         : Detokenize(out.sentence.tokens);
  return out;
}

std::string FormatRecord(const PerturbationRecord& record) {
  std::ostringstream os;
  os << record.position << '\t' << record.original << '\t'
     << record.replacement << '\t' << ReasonName(record.reason) << '\t'
     << SkipName(record.skipped);
  return os.str();
}

PerturbationRecord ParseRecord(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) fields.push_back(field);
  if (fields.size() != 5) throw ParseError("record", 0, "expected 5 fields");
  PerturbationRecord rec;
  try {
    rec.position = std::stoul(fields[0]);
  } catch (const std::exception&) {
    throw ParseError("record", 0, "bad position '" + fields[0] + "'");
  }
  rec.original = fields[1];
  rec.replacement = fields[2];
  if (fields[3] == "rare") {
    rec.reason = PerturbReason::kRare;
  } else if (fields[3] == "random") {
    rec.reason = PerturbReason::kRandom;
  } else {
    throw ParseError("record", 0, "bad reason '" + fields[3] + "'");
  }
  if (fields[4] == "stopword") {
    rec.skipped = SkipReason::kStopword;
  } else if (fields[4] == "no-embedding") {
    rec.skipped = SkipReason::kNoEmbedding;
  } else if (fields[4] == "empty-synonym-set") {
    rec.skipped = SkipReason::kEmptySynonymSet;
  } else if (fields[4] != "-") {
    throw ParseError("record", 0, "bad skip reason '" + fields[4] + "'");
  }
  return rec;
}

void WriteRecords(std::ostream& out,
                  const std::vector<PerturbationRecord>& records) {
  for (const auto& rec : records) out << FormatRecord(rec) << '\n';
}

}  // namespace adfar
