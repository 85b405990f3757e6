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

#include "adfar/attacker.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "adfar/error.h"

namespace adfar {
namespace {

using json = nlohmann::json;

std::size_t WordCount(const Sentence& s) {
  return static_cast<std::size_t>(std::count_if(
      s.tokens.begin(), s.tokens.end(),
      [](const std::string& t) { return !IsPunctuation(t); }));
}

Sentence WithToken(const Sentence& s, std::size_t pos, const std::string& tok) {
  std::vector<std::string> tokens = s.tokens;
  tokens[pos] = tok;
  return FromTokens(std::move(tokens));
}

Sentence WithoutToken(const Sentence& s, std::size_t pos) {
  std::vector<std::string> tokens = s.tokens;
  tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(pos));
  return FromTokens(std::move(tokens));
}

class Counted {
 public:
  Counted(Victim& victim, std::size_t* queries)
      : victim_(victim), queries_(queries) {}
  Eigen::VectorXd operator()(const Sentence& s) {
    if (queries_ != nullptr) ++*queries_;
    return victim_.Probabilities(s);
  }

 private:
  Victim& victim_;
  std::size_t* queries_;
};

}  // namespace

Eigen::VectorXd ClassifierVictim::Probabilities(const Sentence& sentence) {
  return Forward(sentence, params_, nullptr).p_c;
}

void AttackConfig::Validate() const {
  if (max_candidates_per_token == 0) {
    throw ConfigError("max_candidates_per_token must be positive");
  }
  if (!(min_synonym_similarity > 0.0 && min_synonym_similarity <= 1.0)) {
    throw ConfigError("min_synonym_similarity must lie in (0, 1]");
  }
  if (!(max_perturb_fraction >= 0.0 && max_perturb_fraction <= 1.0)) {
    throw ConfigError("max_perturb_fraction must lie in [0, 1]");
  }
}

std::vector<ImportanceScore> TokenImportance(const Sentence& sentence,
                                             Victim& victim, std::size_t gold,
                                             ImportanceMode mode,
                                             const StopWordList& stop_words,
                                             std::size_t* queries) {
  Counted query(victim, queries);
  const double base = query(sentence)(static_cast<Eigen::Index>(gold));
  std::vector<ImportanceScore> scores;
  scores.reserve(sentence.tokens.size());
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const auto& tok = sentence.tokens[i];
    if (IsPunctuation(tok) || stop_words.Contains(tok)) {
      scores.push_back({i, -std::numeric_limits<double>::infinity()});
      continue;
    }
    Sentence probe = mode == ImportanceMode::kDeletion
                         ? WithoutToken(sentence, i)
                         : WithToken(sentence, i, kUnknownPlaceholder);
    scores.push_back({i, base - query(probe)(static_cast<Eigen::Index>(gold))});
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ImportanceScore& a, const ImportanceScore& b) {
                     return a.score > b.score;
                   });
  return scores;
}

std::vector<std::string> CandidateSubstitutes(const std::string& token,
                                              const Lexicon& lexicon,
                                              const AttackConfig& config) {
  auto vec = lexicon.embeddings().Find(token);
  if (!vec) return {};
  if (std::all_of(vec->begin(), vec->end(), [](double x) { return x == 0.0; })) {
    return {};
  }
  const std::size_t want = config.max_candidates_per_token;
  const std::size_t vocab = lexicon.embeddings().size();
  // Stop words are filtered after ranking, so widen the pool until either
  // enough survive or the similarity floor is crossed.
  std::size_t pool = want + 16;
  while (true) {
    auto ranked = lexicon.Synonyms(token, pool);
    std::vector<std::string> out;
    bool below_floor = false;
    for (const auto& e : ranked) {
      if (e.similarity < config.min_synonym_similarity) {
        below_floor = true;
        break;
      }
      if (lexicon.stop_words().Contains(e.word)) continue;
      out.push_back(e.word);
      if (out.size() == want) break;
    }
    if (out.size() == want || below_floor || ranked.size() < pool ||
        pool >= vocab) {
      return out;
    }
    pool *= 2;
  }
}

std::size_t PerturbationBudget(std::size_t word_count, double fraction) {
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(word_count) * fraction + 1e-9));
}

AttackResult Attack(const Sentence& sentence, std::size_t gold, Victim& victim,
                    const Lexicon& lexicon, const AttackConfig& config) {
  AttackResult result;
  result.original_label = gold;
  result.adversarial = sentence;
  result.word_count = WordCount(sentence);
  Counted query(victim, &result.queries);
  const auto g = static_cast<Eigen::Index>(gold);

  Eigen::VectorXd current = query(sentence);
  result.final_label = Argmax(current);
  if (result.final_label != gold) {
    result.success = true;
    return result;
  }
  const std::size_t budget =
      PerturbationBudget(result.word_count, config.max_perturb_fraction);
  if (budget == 0) return result;

  auto ranking = TokenImportance(sentence, victim, gold, config.importance_mode,
                                 lexicon.stop_words(), &result.queries);
  for (const auto& item : ranking) {
    if (std::isinf(item.score) && item.score < 0) break;
    const std::string& original = sentence.tokens[item.position];
    auto candidates = CandidateSubstitutes(original, lexicon, config);
    double best_p = current(g);
    std::optional<std::size_t> best;
    Eigen::VectorXd best_probs;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      Eigen::VectorXd probs =
          query(WithToken(result.adversarial, item.position, candidates[c]));
      if (probs(g) < best_p) {
        best_p = probs(g);
        best = c;
        best_probs = std::move(probs);
      }
    }
    if (!best) continue;
    result.substitutions.push_back({item.position, original, candidates[*best],
                                    current(g), best_p});
    result.adversarial =
        WithToken(result.adversarial, item.position, candidates[*best]);
    current = std::move(best_probs);
    result.final_label = Argmax(current);
    if (result.final_label != gold) {
      result.success = true;
      return result;
    }
    if (result.substitutions.size() >= budget) break;
  }
  return result;
}

std::string AttackResultToJsonLine(const AttackResult& r) {
  json subs = json::array();
  for (const auto& s : r.substitutions) {
    subs.push_back({{"position", s.position},
                    {"original", s.original},
                    {"replacement", s.replacement},
                    {"p_gold_before", s.p_gold_before},
                    {"p_gold_after", s.p_gold_after}});
  }
  json j = {{"success", r.success},
            {"original_label", r.original_label},
            {"final_label", r.final_label},
            {"queries", r.queries},
            {"word_count", r.word_count},
            {"adversarial", r.adversarial.raw},
            {"tokens", r.adversarial.tokens},
            {"substitutions", subs}};
  return j.dump();
}

AttackResult AttackResultFromJsonLine(const std::string& line) {
  try {
    json j = json::parse(line);
    AttackResult r;
    r.success = j.at("success").get<bool>();
    r.original_label = j.at("original_label").get<std::size_t>();
    r.final_label = j.at("final_label").get<std::size_t>();
    r.queries = j.at("queries").get<std::size_t>();
    r.word_count = j.at("word_count").get<std::size_t>();
    r.adversarial.raw = j.at("adversarial").get<std::string>();
    r.adversarial.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto& s : j.at("substitutions")) {
      r.substitutions.push_back({s.at("position").get<std::size_t>(),
                                 s.at("original").get<std::string>(),
                                 s.at("replacement").get<std::string>(),
                                 s.at("p_gold_before").get<double>(),
                                 s.at("p_gold_after").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError("attack record", 0, e.what());
  }
}

}  // namespace adfar
