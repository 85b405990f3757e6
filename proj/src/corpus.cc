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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <unordered_set>

#include "adfar/error.h"
#include "adfar/random.h"

namespace adfar {
namespace {

constexpr double kRarityReference = 5000.0;

double Gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> RandomUnit(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double norm = 0.0;
  for (auto& x : v) {
    x = Gaussian(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

void Normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
}

std::uint64_t LogUniformCount(Rng& rng, double lo, double hi) {
  const double x = std::exp(UniformReal(rng, std::log(lo), std::log(hi)));
  return static_cast<std::uint64_t>(std::llround(x));
}

double Rarity(std::uint64_t count) {
  const double f = std::max<double>(1.0, static_cast<double>(count));
  const double r = (std::log10(kRarityReference) - std::log10(f)) /
                   std::log10(kRarityReference);
  return std::clamp(r, 0.0, 1.0);
}

// Six decimals, so values survive a text round trip bit-exactly.
double Quantize(double x) { return std::round(x * 1e6) / 1e6; }

class NameGenerator {
 public:
  explicit NameGenerator(const std::vector<std::string>& reserved)
      : used_(reserved.begin(), reserved.end()) {}

  std::string Next(Rng& rng) {
    static constexpr char kConsonants[] = "bcdfghjklmnprstvz";
    static constexpr char kVowels[] = "aeiou";
    while (true) {
      std::string w;
      const std::size_t syllables = 2 + UniformIndex(rng, 2);
      for (std::size_t s = 0; s < syllables; ++s) {
        w.push_back(kConsonants[UniformIndex(rng, sizeof(kConsonants) - 1)]);
        w.push_back(kVowels[UniformIndex(rng, sizeof(kVowels) - 1)]);
      }
      if (UniformIndex(rng, 2) == 0) {
        w.push_back(kConsonants[UniformIndex(rng, sizeof(kConsonants) - 1)]);
      }
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::unordered_set<std::string> used_;
};

class WeightedPicker {
 public:
  explicit WeightedPicker(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      total += w;
      cumulative_.push_back(total);
    }
  }
  std::size_t Pick(Rng& rng) const {
    const double x = UniformUnit(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()),
        cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

struct WordEntry {
  std::string word;
  std::uint64_t count = 0;
  std::vector<double> vector;
};

struct Cluster {
  std::size_t cls = 0;
  std::vector<std::size_t> members;  // indices into the word list
};

}  // namespace

void SyntheticCorpusSpec::Validate() const {
  if (n_train == 0) throw ConfigError("n_train must be positive");
  if (n_test == 0) throw ConfigError("n_test must be positive");
  if (n_classes != 2) throw ConfigError("synthetic corpora have two classes");
  if (dim < 4) throw ConfigError("dim must be at least 4");
  if (clusters_per_class == 0 || cluster_size == 0) {
    throw ConfigError("clusters must be non-empty");
  }
  if (heads_per_cluster == 0 ||
      heads_per_cluster + mids_per_cluster > cluster_size) {
    throw ConfigError("cluster tiers exceed cluster_size");
  }
  if (min_length == 0 || min_length > max_length) {
    throw ConfigError("bad sentence length range");
  }
  if (min_signal == 0 || min_signal > max_signal || max_signal + 1 > min_length) {
    throw ConfigError("bad signal-word range");
  }
  if (filler_words == 0) throw ConfigError("filler_words must be positive");
  if (filler_group_size == 0) throw ConfigError("filler_group_size must be positive");
}

SyntheticCorpus GenerateCorpus(const SyntheticCorpusSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  const std::size_t sem_dim = spec.dim - 2;

  SyntheticCorpus corpus;
  corpus.stop_words = StopWordList::Default();

  std::vector<WordEntry> words;
  auto make_vector = [&](double polarity, std::uint64_t count,
                         const std::vector<double>& sem) {
    std::vector<double> v;
    v.reserve(spec.dim);
    v.push_back(Quantize(polarity));
    v.push_back(Quantize(spec.rarity_scale * Rarity(count)));
    for (double x : sem) v.push_back(Quantize(x));
    return v;
  };

  // Stop words: very frequent and neutral.
  std::vector<std::size_t> stop_indices;
  for (const std::string& w : StopWordList::DefaultWords()) {
    const std::uint64_t count = LogUniformCount(rng, 1e5, 2e6);
    stop_indices.push_back(words.size());
    words.push_back({w, count, make_vector(0.0, count, RandomUnit(rng, sem_dim))});
  }
  NameGenerator names(StopWordList::DefaultWords());

  // Filler vocabulary, with a rare tail.
  // Fillers come in small synonym groups around a shared direction.
  std::vector<std::size_t> filler_indices;
  std::vector<double> filler_centre;
  for (std::size_t i = 0; i < spec.filler_words; ++i) {
    if (i % spec.filler_group_size == 0) filler_centre = RandomUnit(rng, sem_dim);
    const bool rare = UniformUnit(rng) < spec.rare_filler_fraction;
    const std::uint64_t count =
        rare ? LogUniformCount(rng, 5, 199) : LogUniformCount(rng, 300, 1e5);
    const double polarity = 0.05 * Gaussian(rng);
    std::vector<double> sem = filler_centre;
    if (spec.filler_group_size > 1) {
      const auto jitter = RandomUnit(rng, sem_dim);
      for (std::size_t k = 0; k < sem_dim; ++k) sem[k] += spec.filler_jitter * jitter[k];
      Normalize(sem);
    }
    filler_indices.push_back(words.size());
    words.push_back({names.Next(rng), count, make_vector(polarity, count, sem)});
  }

  // Signal clusters.
  std::vector<std::vector<double>> regions;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    regions.push_back(RandomUnit(rng, sem_dim));
  }
  std::vector<Cluster> clusters;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    const double sign = c == 1 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < spec.clusters_per_class; ++k) {
      Cluster cluster{c, {}};
      const auto centre = RandomUnit(rng, sem_dim);
      for (std::size_t m = 0; m < spec.cluster_size; ++m) {
        std::uint64_t count;
        double polarity;
        if (m < spec.heads_per_cluster) {
          count = LogUniformCount(rng, 2000, 5e4);
          polarity = sign * spec.polarity * (1.0 + 0.1 * Gaussian(rng));
        } else {
          const bool mid = m < spec.heads_per_cluster + spec.mids_per_cluster;
          count = mid ? LogUniformCount(rng, 200, 1500)
                      : LogUniformCount(rng, 5, 199);
          polarity = sign * spec.polarity *
                     (1.0 - (mid ? spec.mid_spread : spec.spread) *
                                UniformReal(rng, 0.0, 2.0));
        }
        std::vector<double> sem(sem_dim);
        const auto jitter = RandomUnit(rng, sem_dim);
        for (std::size_t i = 0; i < sem_dim; ++i) {
          sem[i] = spec.class_region_weight * regions[c][i] +
                   (1.0 - spec.class_region_weight) * centre[i] +
                   spec.cluster_jitter * jitter[i];
        }
        Normalize(sem);
        cluster.members.push_back(words.size());
        words.push_back({names.Next(rng), count, make_vector(polarity, count, sem)});
      }
      clusters.push_back(std::move(cluster));
    }
  }

  for (const auto& w : words) {
    corpus.embeddings.Add(w.word, w.vector);
    corpus.frequencies.Add(w.word, w.count);
  }

  std::vector<double> filler_weights;
  for (auto i : filler_indices) {
    filler_weights.push_back(
        std::pow(static_cast<double>(words[i].count), spec.filler_frequency_exponent));
  }
  WeightedPicker filler_picker(filler_weights);
  std::vector<WeightedPicker> member_pickers;
  std::vector<std::vector<std::size_t>> class_clusters(spec.n_classes);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    std::vector<double> w;
    for (auto i : clusters[k].members) w.push_back(static_cast<double>(words[i].count));
    member_pickers.emplace_back(w);
    class_clusters[clusters[k].cls].push_back(k);
  }

  auto signal_word = [&](std::size_t cls) -> const std::string& {
    const auto& ks = class_clusters[cls];
    const std::size_t k = ks[UniformIndex(rng, ks.size())];
    return words[clusters[k].members[member_pickers[k].Pick(rng)]].word;
  };

  auto make_split = [&](std::size_t n) {
    Dataset data;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t label = i % spec.n_classes;
      const std::size_t length =
          spec.min_length + UniformIndex(rng, spec.max_length - spec.min_length + 1);
      const std::size_t signal =
          spec.min_signal + UniformIndex(rng, spec.max_signal - spec.min_signal + 1);
      std::vector<std::string> tokens;
      for (std::size_t s = 0; s < signal; ++s) tokens.push_back(signal_word(label));
      if (UniformUnit(rng) < spec.contrast_probability) {
        tokens.push_back(signal_word(1 - label));
      }
      while (tokens.size() < length) {
        if (UniformUnit(rng) < 0.35) {
          tokens.push_back(words[stop_indices[UniformIndex(rng, stop_indices.size())]].word);
        } else {
          tokens.push_back(words[filler_indices[filler_picker.Pick(rng)]].word);
        }
      }
      for (std::size_t t = tokens.size(); t > 1; --t) {
        std::swap(tokens[t - 1], tokens[UniformIndex(rng, t)]);
      }
      data.push_back({Tokenize(Detokenize(tokens) + " ."), label});
    }
    for (std::size_t t = data.size(); t > 1; --t) {
      std::swap(data[t - 1], data[UniformIndex(rng, t)]);
    }
    return data;
  };
  corpus.train = make_split(spec.n_train);
  corpus.test = make_split(spec.n_test);
  return corpus;
}

void WriteCorpus(const std::string& dir, const SyntheticCorpusSpec& spec) {
  SyntheticCorpus corpus = GenerateCorpus(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw WriteError(dir);
  const std::filesystem::path base(dir);

  SaveDataset((base / "train.tsv").string(), corpus.train);
  SaveDataset((base / "test.tsv").string(), corpus.test);

  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw WriteError(p.string());
    return out;
  };
  {
    auto out = open(base / "embeddings.txt");
    const auto& table = corpus.embeddings;
    char buf[32];
    for (std::size_t i = 0; i < table.size(); ++i) {
      out << table.words()[i];
      for (double x : table.VectorAt(i)) {
        std::snprintf(buf, sizeof(buf), " %.6f", x);
        out << buf;
      }
      out << '\n';
    }
    if (!out) throw WriteError((base / "embeddings.txt").string());
  }
  {
    auto out = open(base / "frequencies.txt");
    for (const auto& [w, c] : corpus.frequencies.entries()) {
      out << w << ' ' << c << '\n';
    }
    if (!out) throw WriteError((base / "frequencies.txt").string());
  }
  {
    auto out = open(base / "stopwords.txt");
    for (const std::string& w : StopWordList::DefaultWords()) out << w << '\n';
    if (!out) throw WriteError((base / "stopwords.txt").string());
  }
}

}  // namespace adfar
