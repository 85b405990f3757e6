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

// adfar gen-corpus|train|attack|eval|sweep|report [--config PATH] [flags]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "adfar/attacker.h"
#include "adfar/classifier.h"
#include "adfar/corpus.h"
#include "adfar/dataset.h"
#include "adfar/error.h"
#include "adfar/lexicon.h"
#include "adfar/pipeline.h"
#include "run_config.h"

namespace adfar::tools {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw WriteError(dir);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw WriteError(path.string());
  out << text;
  if (!out) throw WriteError(path.string());
}

std::unique_ptr<Lexicon> LoadLexicon(const std::string& embeddings,
                                     const std::string& frequencies,
                                     const std::string& stopwords,
                                     std::size_t depth) {
  auto lexicon = std::make_unique<Lexicon>(
      LoadEmbeddings(embeddings), LoadFrequencies(frequencies),
      stopwords.empty() ? StopWordList::Default() : LoadStopWords(stopwords));
  if (depth > 0) lexicon->BuildSynonymIndex(depth);
  return lexicon;
}

std::unique_ptr<Lexicon> DefenderLexicon(const RunConfig& c) {
  return LoadLexicon(c.embeddings, c.frequencies, c.stopwords, c.index_depth);
}

// Null unless a disjoint attacker lexicon is configured.
std::unique_ptr<Lexicon> AttackerLexicon(const RunConfig& c) {
  if (c.attacker_embeddings.empty()) return nullptr;
  return LoadLexicon(c.attacker_embeddings,
                     c.attacker_frequencies.empty() ? c.frequencies
                                                    : c.attacker_frequencies,
                     c.stopwords, c.index_depth);
}

RandomizerConfig InferRandomizer(const RunConfig& c) {
  RandomizerConfig r = c.randomizer;
  r.r = c.r_infer;
  return r;
}

DualHeadParams RequireCheckpoint(const RunConfig& c, const Lexicon& lexicon) {
  if (c.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  return LoadCheckpoint(c.checkpoint, lexicon.embeddings());
}

EvalOptions MakeEvalOptions(const RunConfig& c, const Lexicon* attacker) {
  EvalOptions o;
  o.defense = c.defense;
  o.attack = c.attack;
  o.randomizer = InferRandomizer(c);
  o.observe = c.observe;
  o.attacker_lexicon = attacker;
  o.seeds = c.seeds;
  o.jobs = c.jobs;
  o.measure_timing = c.timing;
  return o;
}

int CmdGenCorpus(const RunConfig& c, bool seed_given) {
  SyntheticCorpusSpec spec = c.corpus;
  if (seed_given) spec.seed = c.seed;
  WriteCorpus(c.out, spec);
  std::printf("wrote corpus (seed %llu) to %s\n",
              static_cast<unsigned long long>(spec.seed), c.out.c_str());
  return kExitOk;
}

json LogToJson(const TrainingLog& log) {
  return {{"initial_loss", log.initial_loss},
          {"final_loss", log.final_loss},
          {"epoch_mean_loss", log.epoch_mean_loss},
          {"steps", log.steps}};
}

int CmdTrain(const RunConfig& c) {
  auto lexicon = DefenderLexicon(c);
  Dataset train = LoadDataset(c.train);
  EnsureDir(c.out);
  ExperimentConfig ec;
  ec.shape.input_dim = lexicon->embeddings().dim();
  ec.shape.hidden = c.hidden;
  ec.dropout_p = c.dropout;
  ec.training = c.training;
  ec.attack = c.attack;
  ec.train_randomizer = c.randomizer;
  ec.train_randomizer.r = c.r_train;
  ExperimentModels models = TrainModels(train, *lexicon, ec, c.seed);
  models.baseline.embedding_source = c.embeddings;
  models.adfar.embedding_source = c.embeddings;
  const fs::path out(c.out);
  SaveCheckpoint((out / "baseline.ckpt.json").string(), models.baseline);
  SaveCheckpoint((out / "adfar.ckpt.json").string(), models.adfar);
  json log = {{"seed", c.seed},
              {"n_original", models.n_original},
              {"n_adversarial", models.n_adversarial},
              {"n_randomized", models.n_randomized},
              {"baseline", LogToJson(models.baseline_log)},
              {"adfar", LogToJson(models.adfar_log)}};
  WriteText(out / "train_log.json", log.dump(2) + "\n");
  std::printf(
      "baseline loss %.4f -> %.4f; adfar loss %.4f -> %.4f; bundle "
      "%zu/%zu/%zu\n",
      models.baseline_log.initial_loss, models.baseline_log.final_loss,
      models.adfar_log.initial_loss, models.adfar_log.final_loss,
      models.n_original, models.n_adversarial, models.n_randomized);
  return kExitOk;
}

int CmdAttack(const RunConfig& c) {
  auto lexicon = DefenderLexicon(c);
  auto attacker = AttackerLexicon(c);
  DualHeadParams params = RequireCheckpoint(c, *lexicon);
  Dataset test = LoadDataset(c.test);
  EnsureDir(c.out);
  const fs::path out(c.out);
  std::ofstream records(out / "attacks.jsonl");
  if (!records) throw WriteError((out / "attacks.jsonl").string());
  std::size_t attacked = 0, successes = 0, queries = 0;
  ClassifierVictim victim(params);
  for (const auto& ex : test) {
    if (Predict(ex.sentence, params).label != ex.label) continue;
    AttackResult r = Attack(ex.sentence, ex.label, victim,
                            attacker ? *attacker : *lexicon, c.attack);
    ++attacked;
    successes += r.success ? 1 : 0;
    queries += r.queries;
    records << AttackResultToJsonLine(r) << '\n';
  }
  if (!records) throw WriteError((out / "attacks.jsonl").string());
  const double rate =
      attacked == 0 ? 0.0 : static_cast<double>(successes) / attacked;
  json summary = {{"examples", test.size()},
                  {"attacked", attacked},
                  {"successful", successes},
                  {"attack_success_rate", rate},
                  {"mean_queries",
                   attacked == 0 ? 0.0
                                 : static_cast<double>(queries) / attacked}};
  WriteText(out / "attack_summary.json", summary.dump(2) + "\n");
  std::printf("attacked %zu, successful %zu, success rate %.3f\n", attacked,
              successes, rate);
  return kExitOk;
}

int CmdEval(const RunConfig& c) {
  auto lexicon = DefenderLexicon(c);
  auto attacker = AttackerLexicon(c);
  DualHeadParams params = RequireCheckpoint(c, *lexicon);
  Dataset test = LoadDataset(c.test);
  EnsureDir(c.out);
  EvalReport report =
      Evaluate(test, params, *lexicon, MakeEvalOptions(c, attacker.get()));
  const fs::path out(c.out);
  const std::string title =
      c.defense == DefenseMode::kAdfar ? "ADFAR" : "undefended";
  WriteText(out / "report.json", ReportToJson(report) + "\n");
  const std::string table = FormatReportTable(report, title);
  WriteText(out / "report.txt", table);
  std::cout << table;
  return kExitOk;
}

int CmdSweep(const RunConfig& c) {
  auto lexicon = DefenderLexicon(c);
  auto attacker = AttackerLexicon(c);
  DualHeadParams params = RequireCheckpoint(c, *lexicon);
  Dataset test = LoadDataset(c.test);
  EnsureDir(c.out);
  std::ostringstream table;
  table << c.sweep_param << "\torig_acc\tadv_acc\n";
  for (double value : c.sweep_values) {
    EvalOptions o = MakeEvalOptions(c, attacker.get());
    if (c.sweep_param == "r") {
      o.randomizer.r = value;
    } else if (c.sweep_param == "n-s") {
      o.randomizer.n_s = static_cast<std::size_t>(value);
      o.randomizer.n_f = std::min(o.randomizer.n_f, o.randomizer.n_s);
    } else if (c.sweep_param == "n-f") {
      o.randomizer.n_f = static_cast<std::size_t>(value);
    } else {
      o.randomizer.f_thres = static_cast<std::uint64_t>(value);
    }
    EvalReport r = Evaluate(test, params, *lexicon, o);
    char line[128];
    std::snprintf(line, sizeof(line), "%g\t%.4f\t%.4f\n", value, r.orig_acc,
                  r.adv_acc);
    table << line;
  }
  WriteText(fs::path(c.out) / "sweep.tsv", table.str());
  std::cout << table.str();
  return kExitOk;
}

int CmdReport(const RunConfig& c) {
  if (c.input.empty()) throw ConfigError("--input is required");
  std::ifstream in(c.input);
  if (!in) throw FileNotFoundError(c.input);
  std::stringstream ss;
  ss << in.rdbuf();
  std::cout << FormatReportTable(ReportFromJson(ss.str()), c.input);
  return kExitOk;
}

int Run(int argc, char** argv) {
  CLI::App app{"ADFAR: frequency-aware randomization with anomaly detection"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration");
  std::map<std::string, std::string> raw;
  for (const auto& name : SettingNames()) {
    app.add_option("--" + name, raw[name])->group("Settings");
  }
  const char* commands[][2] = {
      {"gen-corpus", "write a synthetic corpus and its lexicon"},
      {"train", "train baseline and ADFAR checkpoints"},
      {"attack", "attack a checkpoint's classifier on the test set"},
      {"eval", "evaluate a checkpoint, with or without the defense"},
      {"sweep", "evaluate over a grid of one randomizer setting"},
      {"report", "print a saved evaluation report"}};
  for (const auto& cmd : commands) app.add_subcommand(cmd[0], cmd[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::map<std::string, std::string> flags;
  for (const auto& name : SettingNames()) {
    if (app.count("--" + name) > 0) flags[name] = raw[name];
  }
  RunConfig c = ResolveConfig(config_path, flags, [](const char* n) {
    return std::getenv(n);
  });
  const bool seed_given =
      flags.count("seed") > 0 || std::getenv("ADFAR_SEED") != nullptr;

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "gen-corpus") return CmdGenCorpus(c, seed_given);
  if (cmd == "train") return CmdTrain(c);
  if (cmd == "attack") return CmdAttack(c);
  if (cmd == "eval") return CmdEval(c);
  if (cmd == "sweep") return CmdSweep(c);
  return CmdReport(c);
}

}  // namespace
}  // namespace adfar::tools

int main(int argc, char** argv) {
  using namespace adfar::tools;
  try {
    return Run(argc, argv);
  } catch (const adfar::FileNotFoundError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMissingFile;
  } catch (const adfar::VersionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVersion;
  } catch (const adfar::WriteError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUnwritable;
  } catch (const adfar::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMalformed;
  } catch (const adfar::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
