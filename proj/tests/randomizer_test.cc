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
#include <sstream>

#include <gtest/gtest.h>

#include "adfar/corpus.h"
#include "adfar/error.h"
#include "test_util.h"

namespace adfar {
namespace {

using testing::DataPath;
using testing::FixtureLexicon;

const char kTwelve[] = "The film was a stellar , riveting yarn by an auteur .";

std::vector<std::size_t> ParsePositions(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::size_t> out;
  std::size_t p;
  while (in >> p) out.push_back(p);
  return out;
}

TEST(SubstitutionBudgetTest, RoundsHalfUp) {
  EXPECT_EQ(SubstitutionBudget(5, 0.3), 2u);   // 1.5
  EXPECT_EQ(SubstitutionBudget(10, 0.25), 3u); // 2.5
  EXPECT_EQ(SubstitutionBudget(10, 0.3), 3u);
  EXPECT_EQ(SubstitutionBudget(7, 0.0), 0u);
  EXPECT_EQ(SubstitutionBudget(0, 0.5), 0u);
}

TEST(RandomizerConfigTest, Validate) {
  RandomizerConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.n_f = 21;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = RandomizerConfig{};
  c.r = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(SelectCandidatesTest, ZeroRatioWithoutRareWordsIsEmpty) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 0.0;
  Rng rng(1);
  CandidateSet s = SelectCandidates(Tokenize("the movie was a great story ."), c, lex, rng);
  EXPECT_TRUE(s.positions.empty());
  EXPECT_TRUE(s.filtered_stopwords.empty());
  EXPECT_EQ(s.word_count, 6u);
}

TEST(SelectCandidatesTest, AllStopWordsIsEmpty) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 1.0;
  Rng rng(1);
  CandidateSet s = SelectCandidates(Tokenize("the a by an was"), c, lex, rng);
  EXPECT_TRUE(s.positions.empty());
  EXPECT_EQ(s.filtered_stopwords.size(), 5u);
}

// 10 tokens, 2 rare (stellar, auteur), r = 0.3: both rare positions plus one
// random extra, stop words removed afterwards. Expected sets come from the
// reference implementation in tests/oracles.
TEST(SelectCandidatesTest, TenTokenTranscript) {
  Lexicon lex = FixtureLexicon();
  auto kv = testing::ReadKeyValues(DataPath("candidates_golden.txt"));
  Sentence s = Tokenize(kv.at("sentence"));
  ASSERT_EQ(s.tokens.size(), 10u);
  RandomizerConfig c;
  c.r = 0.3;
  for (int seed = 0; seed < 6; ++seed) {
    const std::string line = kv.at("seed " + std::to_string(seed));
    const auto tab = line.find('\t');
    Rng rng(seed);
    CandidateSet got = SelectCandidates(s, c, lex, rng);
    EXPECT_EQ(got.positions, ParsePositions(line.substr(0, tab))) << seed;
    EXPECT_EQ(got.filtered_stopwords, ParsePositions(line.substr(tab + 1))) << seed;
    EXPECT_EQ(got.rare, (std::vector<std::size_t>{4, 9}));
    EXPECT_EQ(got.target, 3u);
    EXPECT_EQ(got.positions.size() + got.filtered_stopwords.size(), 3u);
  }
}

TEST(SelectCandidatesTest, MoreRareWordsThanBudgetKeepsAll) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 0.1;
  Rng rng(3);
  CandidateSet s =
      SelectCandidates(Tokenize("stellar riveting auteur helmer film"), c, lex, rng);
  EXPECT_EQ(s.target, 1u);
  EXPECT_EQ(s.positions, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(BuildSynonymSetTest, ShippedLexiconSizeBound) {
  SyntheticCorpusSpec spec;
  spec.n_train = 10;
  spec.n_test = 10;
  SyntheticCorpus corpus = GenerateCorpus(spec);
  Lexicon lex(corpus.embeddings, corpus.frequencies, corpus.stop_words);
  RandomizerConfig c;  // n_s = 20, n_f = 10
  for (std::size_t i = 0; i < corpus.embeddings.size(); i += 7) {
    EXPECT_LE(BuildSynonymSet(corpus.embeddings.words()[i], c, lex).size(), 10u);
  }
}

TEST(BuildSynonymSetTest, DisabledFilterEqualsTopSynonyms) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.frequency_aware = false;
  c.n_s = 6;
  c.n_f = 2;
  for (const auto& w : lex.embeddings().words()) {
    EXPECT_EQ(BuildSynonymSet(w, c, lex),
              TopSynonyms(w, 6, lex.embeddings(), lex.frequencies()));
  }
}

TEST(BuildSynonymSetTest, MostSimilarButRarestIsExcluded) {
  std::istringstream emb("q 1 0 0\nnear 0.99 0.01 0\nmid 0.9 0.3 0\nfar 0.7 0.7 0\n");
  std::istringstream freq("q 5\nnear 3\nmid 900\nfar 400\n");
  Lexicon lex(ParseEmbeddings(emb, "e"), ParseFrequencies(freq, "f"), StopWordList{});
  RandomizerConfig c;
  c.n_s = 3;
  c.n_f = 2;
  auto got = BuildSynonymSet("q", c, lex);
  // Brute-force filter: the two most frequent of S.
  auto pool = TopSynonyms("q", 3, lex.embeddings(), lex.frequencies());
  ASSERT_EQ(pool.front().word, "near");
  std::sort(pool.begin(), pool.end(),
            [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  pool.resize(2);
  EXPECT_EQ(got, pool);
  EXPECT_EQ(got[0].word, "mid");
  EXPECT_EQ(got[1].word, "far");
}

TEST(BuildSynonymSetTest, NoEmbeddingIsEmpty) {
  Lexicon lex = FixtureLexicon();
  EXPECT_TRUE(BuildSynonymSet("unseen", RandomizerConfig{}, lex).empty());
}

TEST(RandomizeTest, IdentityWhenNothingSelected) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 0.0;
  Rng rng(9);
  Sentence in = Tokenize("The movie was a great story .");
  RandomizedSentence out = Randomize(in, c, lex, rng);
  EXPECT_EQ(out.sentence, in);
  EXPECT_TRUE(out.records.empty());
}

TEST(RandomizeTest, Deterministic) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 0.6;
  c.n_s = 4;
  c.n_f = 2;
  Sentence in = Tokenize(kTwelve);
  Rng a(77), b(77);
  RandomizedSentence x = Randomize(in, c, lex, a);
  RandomizedSentence y = Randomize(in, c, lex, b);
  EXPECT_EQ(x.sentence, y.sentence);
  EXPECT_EQ(x.records, y.records);
}

void CheckGolden(const std::string& file, bool frequency_aware) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 0.5;
  c.f_thres = 200;
  c.n_s = 4;
  c.n_f = 2;
  c.frequency_aware = frequency_aware;
  Rng rng(42);
  Sentence in = Tokenize(kTwelve);
  ASSERT_EQ(in.tokens.size(), 12u);
  RandomizedSentence out = Randomize(in, c, lex, rng);
  std::ostringstream got;
  WriteRecords(got, out.records);
  got << "output\t" << out.sentence.raw << '\n';
  EXPECT_EQ(got.str(), testing::ReadFile(DataPath(file)));
}

TEST(RandomizeTest, TwelveTokenGoldenFrequencyAware) {
  CheckGolden("randomize_fa_golden.tsv", true);
}

TEST(RandomizeTest, TwelveTokenGoldenPlain) {
  CheckGolden("randomize_plain_golden.tsv", false);
}

TEST(RandomizeTest, LogsMissingEmbedding) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 0.0;
  Rng rng(1);
  RandomizedSentence out = Randomize(Tokenize("great zzzunknown story"), c, lex, rng);
  ASSERT_EQ(out.records.size(), 1u);
  EXPECT_EQ(out.records[0].skipped, SkipReason::kNoEmbedding);
  EXPECT_EQ(out.records[0].replacement, "zzzunknown");
  EXPECT_EQ(out.sentence.tokens[1], "zzzunknown");
}

// Chosen replacements are never less frequent than what S \ S_freq offers.
TEST(RandomizeTest, FrequencyMonotonicity) {
  Lexicon lex = FixtureLexicon();
  RandomizerConfig c;
  c.r = 1.0;
  c.n_s = 4;
  c.n_f = 2;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    RandomizedSentence out = Randomize(Tokenize(kTwelve), c, lex, rng);
    for (const auto& rec : out.records) {
      if (rec.skipped) continue;
      auto pool = TopSynonyms(ToLower(rec.original), 4, lex.embeddings(), lex.frequencies());
      auto kept = BuildSynonymSet(rec.original, c, lex);
      std::uint64_t rest_min = UINT64_MAX;
      for (const auto& e : pool) {
        if (std::find(kept.begin(), kept.end(), e) == kept.end()) {
          rest_min = std::min(rest_min, e.frequency);
        }
      }
      EXPECT_GE(lex.frequencies().Count(rec.replacement), rest_min);
    }
  }
}

TEST(RecordTest, FormatParseRoundTrip) {
  PerturbationRecord a{4, "stellar", "great", PerturbReason::kRare, std::nullopt};
  PerturbationRecord b{3, "a", "a", PerturbReason::kRandom, SkipReason::kStopword};
  EXPECT_EQ(FormatRecord(a), "4\tstellar\tgreat\trare\t-");
  EXPECT_EQ(ParseRecord(FormatRecord(a)), a);
  EXPECT_EQ(ParseRecord(FormatRecord(b)), b);
  EXPECT_THROW(ParseRecord("x\ta\tb\trare\t-"), ParseError);
  EXPECT_THROW(ParseRecord("1\ta\tb\tsometimes\t-"), ParseError);
}

}  // namespace
}  // namespace adfar
