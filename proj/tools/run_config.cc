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

#include "run_config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adfar/error.h"

namespace adfar::tools {
namespace {

using json = nlohmann::json;
using Setter = std::function<void(RunConfig&, const std::string&)>;

template <typename T>
T ParseNumber(const std::string& name, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for " + name + ": '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& name, const std::string& text) {
  const std::string t = ToLower(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("bad value for " + name + ": '" + text + "'");
}

template <typename T>
std::vector<T> ParseList(const std::string& name, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(ParseNumber<T>(name, item));
  }
  if (out.empty()) throw ConfigError(name + " must not be empty");
  return out;
}

#define NUM(field, type)                                           \
  [](RunConfig& c, const std::string& v) {                         \
    c.field = ParseNumber<type>(#field, v);                        \
  }
#define STR(field) [](RunConfig& c, const std::string& v) { c.field = v; }

const std::map<std::string, Setter>& Setters() {
  static const auto* setters = new std::map<std::string, Setter>{
      {"embeddings", STR(embeddings)},
      {"frequencies", STR(frequencies)},
      {"stopwords", STR(stopwords)},
      {"train", STR(train)},
      {"test", STR(test)},
      {"out", STR(out)},
      {"checkpoint", STR(checkpoint)},
      {"input", STR(input)},
      {"attacker-embeddings", STR(attacker_embeddings)},
      {"attacker-frequencies", STR(attacker_frequencies)},
      {"r-train", NUM(r_train, double)},
      {"r-infer", NUM(r_infer, double)},
      {"f-thres", NUM(randomizer.f_thres, std::uint64_t)},
      {"n-s", NUM(randomizer.n_s, std::size_t)},
      {"n-f", NUM(randomizer.n_f, std::size_t)},
      {"frequency-aware",
       [](RunConfig& c, const std::string& v) {
         c.randomizer.frequency_aware = ParseBool("frequency-aware", v);
       }},
      {"importance",
       [](RunConfig& c, const std::string& v) {
         if (v == "deletion") {
           c.attack.importance_mode = ImportanceMode::kDeletion;
         } else if (v == "saliency") {
           c.attack.importance_mode = ImportanceMode::kSaliency;
         } else {
           throw ConfigError("importance must be deletion or saliency");
         }
       }},
      {"max-candidates", NUM(attack.max_candidates_per_token, std::size_t)},
      {"min-similarity", NUM(attack.min_synonym_similarity, double)},
      {"max-perturb-fraction", NUM(attack.max_perturb_fraction, double)},
      {"epochs", NUM(training.epochs, std::size_t)},
      {"batch-size", NUM(training.batch_size, std::size_t)},
      {"learning-rate", NUM(training.learning_rate, double)},
      {"weight-decay", NUM(training.weight_decay, double)},
      {"hidden", NUM(hidden, std::size_t)},
      {"dropout", NUM(dropout, double)},
      {"index-depth", NUM(index_depth, std::size_t)},
      {"seed", NUM(seed, std::uint64_t)},
      {"seeds",
       [](RunConfig& c, const std::string& v) {
         c.seeds = ParseList<std::uint64_t>("seeds", v);
       }},
      {"jobs", NUM(jobs, std::size_t)},
      {"observe",
       [](RunConfig& c, const std::string& v) {
         if (v == "final") {
           c.observe = Observe::kFinal;
         } else if (v == "first-pass") {
           c.observe = Observe::kFirstPass;
         } else {
           throw ConfigError("observe must be final or first-pass");
         }
       }},
      {"defense",
       [](RunConfig& c, const std::string& v) {
         if (v == "adfar") {
           c.defense = DefenseMode::kAdfar;
         } else if (v == "none") {
           c.defense = DefenseMode::kNone;
         } else {
           throw ConfigError("defense must be adfar or none");
         }
       }},
      {"timing",
       [](RunConfig& c, const std::string& v) {
         c.timing = ParseBool("timing", v);
       }},
      {"param",
       [](RunConfig& c, const std::string& v) {
         if (v != "r" && v != "n-s" && v != "n-f" && v != "f-thres") {
           throw ConfigError("sweep param must be r, n-s, n-f or f-thres");
         }
         c.sweep_param = v;
       }},
      {"values",
       [](RunConfig& c, const std::string& v) {
         c.sweep_values = ParseList<double>("values", v);
       }},
      {"corpus-n-train", NUM(corpus.n_train, std::size_t)},
      {"corpus-n-test", NUM(corpus.n_test, std::size_t)},
      {"corpus-dim", NUM(corpus.dim, std::size_t)},
      {"corpus-filler-words", NUM(corpus.filler_words, std::size_t)},
      {"corpus-filler-group-size", NUM(corpus.filler_group_size, std::size_t)},
      {"corpus-filler-jitter", NUM(corpus.filler_jitter, double)},
      {"corpus-clusters-per-class", NUM(corpus.clusters_per_class, std::size_t)},
      {"corpus-cluster-size", NUM(corpus.cluster_size, std::size_t)},
      {"corpus-min-length", NUM(corpus.min_length, std::size_t)},
      {"corpus-max-length", NUM(corpus.max_length, std::size_t)},
      {"corpus-spread", NUM(corpus.spread, double)},
      {"corpus-mid-spread", NUM(corpus.mid_spread, double)},
      {"corpus-seed", NUM(corpus.seed, std::uint64_t)},
  };
  return *setters;
}

#undef NUM
#undef STR

bool IsPathSetting(const std::string& name) {
  static const char* const kPaths[] = {
      "embeddings", "frequencies", "stopwords",           "train",
      "test",       "out",         "checkpoint",          "input",
      "attacker-embeddings",       "attacker-frequencies"};
  return std::find(std::begin(kPaths), std::end(kPaths), name) !=
         std::end(kPaths);
}

std::string ValueText(const std::string& name, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!item.is_number()) throw ConfigError(name + ": expected numbers");
      if (!out.empty()) out += ',';
      out += item.dump();
    }
    return out;
  }
  throw ConfigError(name + ": unsupported value type");
}

std::string Dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

}  // namespace

const std::vector<std::string>& SettingNames() {
  static const auto* names = [] {
    auto* v = new std::vector<std::string>;
    for (const auto& [name, _] : Setters()) v->push_back(name);
    return v;
  }();
  return *names;
}

void ApplySetting(RunConfig& config, const std::string& name,
                  const std::string& value) {
  const auto& setters = Setters();
  auto it = setters.find(name);
  if (it == setters.end()) throw ConfigError("unknown setting: " + name);
  it->second(config, value);
}

void ApplyConfigJson(RunConfig& config, const std::string& text,
                     const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("config", 0, e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto apply = [&](const std::string& name, const json& v) {
    std::string value = ValueText(name, v);
    if (IsPathSetting(name) && !value.empty() && !base_dir.empty() &&
        std::filesystem::path(value).is_relative()) {
      value = (std::filesystem::path(base_dir) / value).string();
    }
    ApplySetting(config, name, value);
  };
  // Sections only group keys, except "corpus" which prefixes them.
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      const std::string prefix = key == "corpus" ? "corpus-" : "";
      for (const auto& [inner, v] : value.items()) {
        apply(prefix + Dashed(inner), v);
      }
    } else {
      apply(Dashed(key), value);
    }
  }
}

void ApplyConfigFile(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path);
  std::stringstream ss;
  ss << in.rdbuf();
  ApplyConfigJson(config, ss.str(),
                  std::filesystem::path(path).parent_path().string());
}

std::string EnvName(const std::string& setting) {
  std::string out = "ADFAR_";
  for (char ch : setting) {
    out += ch == '-' ? '_'
                     : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

RunConfig ResolveConfig(
    const std::string& config_path,
    const std::map<std::string, std::string>& flags,
    const std::function<const char*(const char*)>& getenv) {
  RunConfig config;
  std::string path = config_path;
  if (const char* env = getenv("ADFAR_CONFIG")) path = env;
  if (!path.empty()) ApplyConfigFile(config, path);
  for (const auto& [name, value] : flags) ApplySetting(config, name, value);
  for (const auto& name : SettingNames()) {
    if (const char* env = getenv(EnvName(name).c_str())) {
      ApplySetting(config, name, env);
    }
  }
  return config;
}

}  // namespace adfar::tools
