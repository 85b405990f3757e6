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

#ifndef ADFAR_TOOLS_RUN_CONFIG_H_
#define ADFAR_TOOLS_RUN_CONFIG_H_

// Run configuration for the adfar tool. Values come from a JSON file, then
// command-line flags, then ADFAR_* environment variables, each layer
// overriding the one before.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adfar/attacker.h"
#include "adfar/classifier.h"
#include "adfar/corpus.h"
#include "adfar/pipeline.h"
#include "adfar/randomizer.h"

namespace adfar::tools {

// Exit codes. Stable; documented in the README.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitMissingFile = 3,
  kExitMalformed = 4,
  kExitVersion = 5,
  kExitUnwritable = 6,
};

struct RunConfig {
  // Paths.
  std::string embeddings = "data/embeddings.txt";
  std::string frequencies = "data/frequencies.txt";
  std::string stopwords;  // empty: built-in list
  std::string train = "data/train.tsv";
  std::string test = "data/test.tsv";
  std::string out = "out";
  std::string checkpoint;
  std::string input;  // report command
  // Optional disjoint attacker lexicon.
  std::string attacker_embeddings;
  std::string attacker_frequencies;

  RandomizerConfig randomizer;  // shared f_thres / n_s / n_f / frequency_aware
  double r_train = 0.25;
  double r_infer = 0.30;
  AttackConfig attack;
  TrainingConfig training;
  std::size_t hidden = 16;
  double dropout = 0.1;
  std::size_t index_depth = 64;

  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t jobs = 1;
  Observe observe = Observe::kFinal;
  DefenseMode defense = DefenseMode::kAdfar;
  bool timing = false;

  std::string sweep_param = "r";
  std::vector<double> sweep_values = {0.05, 0.10, 0.15, 0.20, 0.25,
                                      0.30, 0.35, 0.40, 0.45, 0.50};

  SyntheticCorpusSpec corpus;
};

// Names accepted by ApplySetting, e.g. "seed", "r-infer", "observe".
const std::vector<std::string>& SettingNames();

// Sets one named value from its textual form. Throws ConfigError for an
// unknown name or an unparsable value.
void ApplySetting(RunConfig& config, const std::string& name,
                  const std::string& value);

// Reads a JSON config. Relative paths are taken relative to the file's
// directory. Throws FileNotFoundError, ParseError or ConfigError.
void ApplyConfigFile(RunConfig& config, const std::string& path);
void ApplyConfigJson(RunConfig& config, const std::string& text,
                     const std::string& base_dir);

// ADFAR_<NAME> with dashes as underscores, e.g. ADFAR_R_INFER.
std::string EnvName(const std::string& setting);

// file < flags < environment. `getenv` is injectable for tests.
RunConfig ResolveConfig(
    const std::string& config_path,
    const std::map<std::string, std::string>& flags,
    const std::function<const char*(const char*)>& getenv);

}  // namespace adfar::tools

#endif  // ADFAR_TOOLS_RUN_CONFIG_H_
