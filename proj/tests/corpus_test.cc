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

#include "adfar/corpus.h"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "adfar/classifier.h"
#include "adfar/error.h"
#include "adfar/pipeline.h"
#include "test_util.h"

namespace adfar {
namespace {

namespace fs = std::filesystem;

SyntheticCorpusSpec SmallSpec() {
  SyntheticCorpusSpec spec;
  spec.n_train = 400;
  spec.n_test = 100;
  return spec;
}

fs::path TempDir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() /
               ("adfar_corpus_" + tag + "_" +
                std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(p);
  return p;
}

TEST(CorpusTest, SameSeedWritesIdenticalFiles) {
  fs::path a = TempDir("a"), b = TempDir("b");
  WriteCorpus(a.string(), SmallSpec());
  WriteCorpus(b.string(), SmallSpec());
  for (const char* f : {"train.tsv", "test.tsv", "embeddings.txt",
                        "frequencies.txt", "stopwords.txt"}) {
    std::string x = testing::ReadFile((a / f).string());
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, testing::ReadFile((b / f).string())) << f;
  }
  SyntheticCorpusSpec other = SmallSpec();
  other.seed = 8;
  fs::path c = TempDir("c");
  WriteCorpus(c.string(), other);
  EXPECT_NE(testing::ReadFile((a / "train.tsv").string()),
            testing::ReadFile((c / "train.tsv").string()));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST(CorpusTest, WrittenFilesLoadBack) {
  fs::path dir = TempDir("load");
  WriteCorpus(dir.string(), SmallSpec());
  SyntheticCorpus mem = GenerateCorpus(SmallSpec());
  EXPECT_EQ(LoadDataset((dir / "train.tsv").string()), mem.train);
  EXPECT_EQ(LoadDataset((dir / "test.tsv").string()), mem.test);
  EmbeddingTable e = LoadEmbeddings((dir / "embeddings.txt").string());
  ASSERT_EQ(e.size(), mem.embeddings.size());
  EXPECT_EQ(e.dim(), mem.embeddings.dim());
  for (std::size_t i = 0; i < e.size(); ++i) {
    auto u = e.VectorAt(i), v = mem.embeddings.VectorAt(i);
    for (std::size_t k = 0; k < e.dim(); ++k) EXPECT_NEAR(u[k], v[k], 1e-9);
  }
  FrequencyTable f = LoadFrequencies((dir / "frequencies.txt").string());
  EXPECT_EQ(f.entries(), mem.frequencies.entries());
  fs::remove_all(dir);
}

TEST(CorpusTest, InvalidSpecs) {
  SyntheticCorpusSpec spec;
  spec.n_train = 0;
  EXPECT_THROW(GenerateCorpus(spec), ConfigError);
  spec = SyntheticCorpusSpec{};
  spec.min_length = 20;
  EXPECT_THROW(spec.Validate(), ConfigError);
  spec = SyntheticCorpusSpec{};
  spec.mids_per_cluster = spec.cluster_size;
  EXPECT_THROW(spec.Validate(), ConfigError);
}

TEST(CorpusTest, ShapeOfTheData) {
  SyntheticCorpus c = GenerateCorpus(SmallSpec());
  ASSERT_EQ(c.train.size(), 400u);
  ASSERT_EQ(c.test.size(), 100u);
  for (const Dataset* d : {&c.train, &c.test}) {
    std::size_t ones = 0;
    for (const auto& ex : *d) {
      ones += ex.label;
      EXPECT_LE(ex.label, 1u);
      std::size_t words = 0;
      for (const auto& t : ex.sentence.tokens) {
        if (IsPunctuation(t)) continue;
        ++words;
        EXPECT_TRUE(c.embeddings.Contains(t)) << t;
      }
      EXPECT_GE(words, 8u);
      EXPECT_LE(words, 16u);
    }
    const double diff = std::abs(2.0 * ones - static_cast<double>(d->size()));
    EXPECT_LE(diff, 1.0);
  }
  // There are rare words for the randomizer to find.
  std::size_t rare = 0;
  for (const auto& [w, n] : c.frequencies.entries()) rare += n < 200;
  EXPECT_GT(rare, 0u);
}

TEST(CorpusTest, BaselineLearnsTheTask) {
  SyntheticCorpus c = GenerateCorpus(SyntheticCorpusSpec{});
  DualHeadParams init =
      DualHeadParams::Initialize(c.embeddings, {c.embeddings.dim(), 16, 2}, 0.1, 1);
  TrainingConfig cfg;
  cfg.seed = 2;
  TrainedModel m = Train(AsTrainingExamples(c.train), init, cfg);
  std::size_t correct = 0;
  for (const auto& ex : c.test) correct += Predict(ex.sentence, m.params).label == ex.label;
  EXPECT_GE(correct / 500.0, 0.9);
}

}  // namespace
}  // namespace adfar
