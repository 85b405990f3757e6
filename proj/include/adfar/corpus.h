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

#ifndef ADFAR_CORPUS_H_
#define ADFAR_CORPUS_H_

// Synthetic sentiment-style corpus with its own lexicon.
//
// Each class owns a number of synonym clusters. A cluster has a few frequent
// "head" words, some mid-frequency words and a tail of rare words, all close
// together in embedding space. Embedding layout:
//
//   [0]      polarity: +P for class-1 heads, -P for class-0 heads; the
//            other members scatter around it (mid-frequency words a little,
//            rare words a lot), so some synonyms point the wrong way
//   [1]      rarity: grows as log-frequency falls
//   [2, d)   semantics: cluster centre + jitter for signal words (plus an
//            optional per-class region), a group direction + jitter for
//            filler words (one word per group means no filler synonyms)
//
// Sentences mix a few signal words of their class (drawn by frequency, so
// mostly head words) with filler and stop words.

#include <cstddef>
#include <cstdint>
#include <string>

#include "adfar/dataset.h"
#include "adfar/lexicon.h"

namespace adfar {

struct SyntheticCorpusSpec {
  std::size_t n_train = 2000;
  std::size_t n_test = 500;
  std::size_t n_classes = 2;
  std::size_t dim = 32;
  std::size_t filler_words = 400;
  double rare_filler_fraction = 0.1;
  std::size_t filler_group_size = 4;  // fillers per synonym group
  double filler_jitter = 0.5;
  std::size_t clusters_per_class = 12;
  std::size_t cluster_size = 14;
  std::size_t heads_per_cluster = 3;
  std::size_t mids_per_cluster = 7;  // the remainder is rare
  double polarity = 0.6;
  double spread = 1.0;      // rare members
  double mid_spread = 0.4;  // mid-frequency members
  double rarity_scale = 0.5;
  double class_region_weight = 0.0;  // shared per-class direction
  double cluster_jitter = 0.15;
  std::size_t min_length = 8;
  std::size_t max_length = 16;
  std::size_t min_signal = 2;
  std::size_t max_signal = 3;
  double contrast_probability = 0.1;
  double filler_frequency_exponent = 0.35;
  std::uint64_t seed = 7;

  // Throws ConfigError on an unusable spec (e.g. n_train == 0).
  void Validate() const;
};

struct SyntheticCorpus {
  Dataset train;
  Dataset test;
  EmbeddingTable embeddings;
  FrequencyTable frequencies;
  StopWordList stop_words;
};

SyntheticCorpus GenerateCorpus(const SyntheticCorpusSpec& spec);

// Writes train.tsv, test.tsv, embeddings.txt, frequencies.txt and
// stopwords.txt into `dir` (created if needed). Throws WriteError.
void WriteCorpus(const std::string& dir, const SyntheticCorpusSpec& spec);

}  // namespace adfar

#endif  // ADFAR_CORPUS_H_
