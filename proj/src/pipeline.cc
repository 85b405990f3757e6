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

#include "adfar/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "adfar/error.h"

namespace adfar {
namespace {

using json = nlohmann::json;

// Stream tags for DeriveSeed.
constexpr std::uint64_t kBundleStream = 0xb0;
constexpr std::uint64_t kCleanStream = 1;
constexpr std::uint64_t kAttackStream = 2;
constexpr std::uint64_t kRecheckStream = 3;

struct ExampleOutcome {
  bool clean_correct = false;
  bool clean_flagged = false;
  bool clean_path_b = false;
  bool attacked = false;
  bool success = false;
  bool adv_correct = false;
  bool adv_sample = false;  // successful attack with >= 1 substitution
  bool adv_flagged = false;
  std::size_t queries = 0;
  double clean_time_us = 0.0;
};

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ExampleOutcome RunExample(const LabeledSentence& ex, std::size_t index,
                          std::uint64_t seed, const DualHeadParams& params,
                          const Lexicon& lexicon, const EvalOptions& options) {
  ExampleOutcome out;
  const bool defended = options.defense == DefenseMode::kAdfar;

  std::size_t clean_label = 0;
  const auto start = std::chrono::steady_clock::now();
  if (defended) {
    Rng rng(DeriveSeed(seed, index, kCleanStream));
    FinalPrediction pred =
        AdfarInfer(ex.sentence, params, options.randomizer, lexicon, rng);
    clean_label = pred.label;
    out.clean_flagged = pred.detector_verdict;
    out.clean_path_b = pred.path == InferencePath::kB;
  } else {
    Prediction pred = Predict(ex.sentence, params);
    clean_label = pred.label;
    out.clean_flagged = pred.is_adversarial;
  }
  if (options.measure_timing) {
    out.clean_time_us = std::chrono::duration<double, std::micro>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  }
  out.clean_correct = clean_label == ex.label;
  if (!out.clean_correct) return out;
  if (!options.attack_enabled) {
    out.adv_correct = true;
    return out;
  }

  out.attacked = true;
  const Lexicon& attack_lexicon =
      options.attacker_lexicon ? *options.attacker_lexicon : lexicon;
  AttackResult result;
  if (defended) {
    DefendedVictim victim(params, options.randomizer, lexicon,
                          DeriveSeed(seed, index, kAttackStream),
                          options.observe);
    result = Attack(ex.sentence, ex.label, victim, attack_lexicon, options.attack);
  } else {
    ClassifierVictim victim(params);
    result = Attack(ex.sentence, ex.label, victim, attack_lexicon, options.attack);
  }
  out.success = result.success;
  out.queries = result.queries;

  std::size_t adv_label = 0;
  if (defended) {
    Rng rng(DeriveSeed(seed, index, kRecheckStream));
    adv_label =
        AdfarInfer(result.adversarial, params, options.randomizer, lexicon, rng)
            .label;
  } else {
    adv_label = Predict(result.adversarial, params).label;
  }
  out.adv_correct = adv_label == ex.label;
  if (result.success && !result.substitutions.empty()) {
    out.adv_sample = true;
    out.adv_flagged = Predict(result.adversarial, params).is_adversarial;
  }
  return out;
}

SeedReport RunSeed(const Dataset& test, const DualHeadParams& params,
                   const Lexicon& lexicon, const EvalOptions& options,
                   std::uint64_t seed) {
  std::vector<ExampleOutcome> outcomes(test.size());
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < test.size(); ++i) {
      outcomes[i] = RunExample(test[i], i, seed, params, lexicon, options);
    }
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < test.size(); i += jobs) {
          outcomes[i] = RunExample(test[i], i, seed, params, lexicon, options);
        }
      });
    }
  }

  SeedReport r;
  r.seed = seed;
  r.examples = test.size();
  std::size_t clean_correct = 0, adv_correct = 0, path_b = 0;
  std::size_t queries = 0, n_normal = 0, n_flagged = 0;
  double t_normal = 0.0, t_flagged = 0.0;
  std::vector<bool> predicted, gold;
  for (const auto& o : outcomes) {
    clean_correct += o.clean_correct ? 1 : 0;
    adv_correct += o.adv_correct ? 1 : 0;
    r.attacked += o.attacked ? 1 : 0;
    if (o.attacked) {
      r.successful += o.success ? 1 : 0;
      queries += o.queries;
    }
    path_b += o.clean_path_b ? 1 : 0;
    if (o.clean_path_b) {
      ++n_flagged;
      t_flagged += o.clean_time_us;
    } else {
      ++n_normal;
      t_normal += o.clean_time_us;
    }
    predicted.push_back(o.clean_flagged);
    gold.push_back(false);
  }
  for (const auto& o : outcomes) {
    if (!o.adv_sample) continue;
    predicted.push_back(o.adv_flagged);
    gold.push_back(true);
  }
  r.orig_acc = Ratio(clean_correct, test.size());
  r.adv_acc = Ratio(adv_correct, test.size());
  r.attack_success_rate = Ratio(r.successful, r.attacked);
  r.mean_queries = r.attacked == 0 ? 0.0
                                   : static_cast<double>(queries) /
                                         static_cast<double>(r.attacked);
  r.flagged_clean_rate = Ratio(path_b, test.size());
  r.detection = ComputeDetectionMetrics(predicted, gold);
  if (options.measure_timing) {
    r.mean_time_normal_us = n_normal == 0 ? 0.0 : t_normal / n_normal;
    r.mean_time_flagged_us = n_flagged == 0 ? 0.0 : t_flagged / n_flagged;
  }
  return r;
}

json DetectionToJson(const DetectionMetrics& d) {
  return {{"precision", d.precision},
          {"recall", d.recall},
          {"f1", d.f1},
          {"tp", d.tp},
          {"fp", d.fp},
          {"fn", d.fn},
          {"tn", d.tn},
          {"precision_degenerate", d.precision_degenerate},
          {"recall_degenerate", d.recall_degenerate},
          {"f1_degenerate", d.f1_degenerate}};
}

DetectionMetrics DetectionFromJson(const json& j) {
  DetectionMetrics d;
  d.precision = j.at("precision").get<double>();
  d.recall = j.at("recall").get<double>();
  d.f1 = j.at("f1").get<double>();
  d.tp = j.at("tp").get<std::size_t>();
  d.fp = j.at("fp").get<std::size_t>();
  d.fn = j.at("fn").get<std::size_t>();
  d.tn = j.at("tn").get<std::size_t>();
  d.precision_degenerate = j.at("precision_degenerate").get<bool>();
  d.recall_degenerate = j.at("recall_degenerate").get<bool>();
  d.f1_degenerate = j.at("f1_degenerate").get<bool>();
  return d;
}

}  // namespace

std::vector<TrainingExample> TrainingSetBundle::Flatten() const {
  std::vector<TrainingExample> all;
  all.reserve(original.size() + adversarial.size() +
              randomized_adversarial.size());
  all.insert(all.end(), original.begin(), original.end());
  all.insert(all.end(), adversarial.begin(), adversarial.end());
  all.insert(all.end(), randomized_adversarial.begin(),
             randomized_adversarial.end());
  return all;
}

std::vector<TrainingExample> AsTrainingExamples(const Dataset& data) {
  std::vector<TrainingExample> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    out.push_back({ex.sentence, ex.label, std::nullopt, false});
  }
  return out;
}

TrainingSetBundle BuildTrainingBundle(const Dataset& original,
                                      const AttackFn& attack,
                                      const RandomizerConfig& randomizer,
                                      const Lexicon& lexicon,
                                      std::uint64_t seed) {
  if (original.empty()) throw Error("cannot build a bundle from an empty set");
  randomizer.Validate();
  TrainingSetBundle bundle;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto& ex = original[i];
    bundle.original.push_back({ex.sentence, ex.label, 0, true});
    AttackResult result = attack(ex.sentence, ex.label, i);
    // A vacuous success (victim already wrong) leaves the text unchanged and
    // is not an adversarial sample.
    if (result.success && !result.substitutions.empty()) {
      bundle.adversarial.push_back({result.adversarial, ex.label, 1, true});
    }
  }
  std::size_t j = 0;
  for (const auto* part : {&bundle.original, &bundle.adversarial}) {
    for (const auto& ex : *part) {
      Rng rng(DeriveSeed(seed, j++, kBundleStream));
      RandomizedSentence rs = Randomize(ex.sentence, randomizer, lexicon, rng);
      bundle.randomized_adversarial.push_back(
          {std::move(rs.sentence), ex.label, std::nullopt, false});
    }
  }
  return bundle;
}

AttackFn MakeClassifierAttack(const DualHeadParams& victim,
                              const Lexicon& lexicon,
                              const AttackConfig& config) {
  return [&victim, &lexicon, config](const Sentence& s, std::size_t gold,
                                     std::size_t) {
    ClassifierVictim v(victim);
    return Attack(s, gold, v, lexicon, config);
  };
}

FinalPrediction AdfarInfer(const Sentence& sentence,
                           const DualHeadParams& params,
                           const RandomizerConfig& randomizer,
                           const Lexicon& lexicon, Rng& rng) {
  FinalPrediction out;
  ForwardOutput first = Forward(sentence, params, nullptr);
  out.forward_passes = 1;
  out.detector_verdict = Argmax(first.p_d) == 1;
  out.first_pass_p_c = first.p_c;
  if (!out.detector_verdict) {
    out.path = InferencePath::kA;
    out.label = Argmax(first.p_c);
    out.p_c = std::move(first.p_c);
    return out;
  }
  out.path = InferencePath::kB;
  RandomizedSentence rs = Randomize(sentence, randomizer, lexicon, rng);
  ForwardOutput second = Forward(rs.sentence, params, nullptr);
  out.forward_passes = 2;
  out.label = Argmax(second.p_c);
  out.p_c = std::move(second.p_c);
  out.randomized_text = std::move(rs.sentence);
  return out;
}

Eigen::VectorXd DefendedVictim::Probabilities(const Sentence& sentence) {
  FinalPrediction pred = AdfarInfer(sentence, params_, randomizer_, lexicon_, rng_);
  return observe_ == Observe::kFinal ? pred.p_c : pred.first_pass_p_c;
}

DetectionMetrics ComputeDetectionMetrics(const std::vector<bool>& predicted,
                                         const std::vector<bool>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error("detection metrics: length mismatch");
  }
  if (predicted.empty()) throw Error("detection metrics: empty input");
  DetectionMetrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && gold[i]) ++m.tp;
    if (predicted[i] && !gold[i]) ++m.fp;
    if (!predicted[i] && gold[i]) ++m.fn;
    if (!predicted[i] && !gold[i]) ++m.tn;
  }
  m.precision_degenerate = m.tp + m.fp == 0;
  m.recall_degenerate = m.tp + m.fn == 0;
  m.precision = Ratio(m.tp, m.tp + m.fp);
  m.recall = Ratio(m.tp, m.tp + m.fn);
  m.f1_degenerate = m.precision + m.recall == 0.0;
  m.f1 = m.f1_degenerate
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

EvalReport Evaluate(const Dataset& test, const DualHeadParams& params,
                    const Lexicon& lexicon, const EvalOptions& options) {
  if (test.empty()) throw Error("evaluation set is empty");
  if (options.seeds.empty()) throw ConfigError("evaluation needs a seed");
  options.randomizer.Validate();
  options.attack.Validate();

  EvalReport report;
  report.seeds = options.seeds;
  for (auto seed : options.seeds) {
    report.per_seed.push_back(RunSeed(test, params, lexicon, options, seed));
  }
  const double n = static_cast<double>(report.per_seed.size());
  for (const auto& s : report.per_seed) {
    report.orig_acc += s.orig_acc / n;
    report.adv_acc += s.adv_acc / n;
    report.attack_success_rate += s.attack_success_rate / n;
    report.detector_precision += s.detection.precision / n;
    report.detector_recall += s.detection.recall / n;
    report.detector_f1 += s.detection.f1 / n;
    report.mean_queries += s.mean_queries / n;
    report.mean_time_normal_us += s.mean_time_normal_us / n;
    report.mean_time_flagged_us += s.mean_time_flagged_us / n;
  }
  return report;
}

std::string ReportToJson(const EvalReport& report) {
  json per_seed = json::array();
  for (const auto& s : report.per_seed) {
    per_seed.push_back({{"seed", s.seed},
                        {"examples", s.examples},
                        {"attacked", s.attacked},
                        {"successful", s.successful},
                        {"orig_acc", s.orig_acc},
                        {"adv_acc", s.adv_acc},
                        {"attack_success_rate", s.attack_success_rate},
                        {"detection", DetectionToJson(s.detection)},
                        {"mean_queries", s.mean_queries},
                        {"flagged_clean_rate", s.flagged_clean_rate},
                        {"mean_time_normal_us", s.mean_time_normal_us},
                        {"mean_time_flagged_us", s.mean_time_flagged_us}});
  }
  json j = {{"schema_version", std::to_string(kReportSchemaMajor) + "." +
                                   std::to_string(kReportSchemaMinor)},
            {"seeds", report.seeds},
            {"mean",
             {{"orig_acc", report.orig_acc},
              {"adv_acc", report.adv_acc},
              {"attack_success_rate", report.attack_success_rate},
              {"detector_precision", report.detector_precision},
              {"detector_recall", report.detector_recall},
              {"detector_f1", report.detector_f1},
              {"mean_queries", report.mean_queries},
              {"mean_time_normal_us", report.mean_time_normal_us},
              {"mean_time_flagged_us", report.mean_time_flagged_us}}},
            {"per_seed", per_seed}};
  return j.dump(2);
}

EvalReport ReportFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("report", 0, e.what());
  }
  try {
    const auto version = j.at("schema_version").get<std::string>();
    int major = -1;
    std::sscanf(version.c_str(), "%d", &major);
    if (major != kReportSchemaMajor) {
      throw VersionError("report schema_version " + version +
                         " is not supported");
    }
    EvalReport r;
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    const auto& m = j.at("mean");
    r.orig_acc = m.at("orig_acc").get<double>();
    r.adv_acc = m.at("adv_acc").get<double>();
    r.attack_success_rate = m.at("attack_success_rate").get<double>();
    r.detector_precision = m.at("detector_precision").get<double>();
    r.detector_recall = m.at("detector_recall").get<double>();
    r.detector_f1 = m.at("detector_f1").get<double>();
    r.mean_queries = m.at("mean_queries").get<double>();
    r.mean_time_normal_us = m.at("mean_time_normal_us").get<double>();
    r.mean_time_flagged_us = m.at("mean_time_flagged_us").get<double>();
    for (const auto& s : j.at("per_seed")) {
      SeedReport sr;
      sr.seed = s.at("seed").get<std::uint64_t>();
      sr.examples = s.at("examples").get<std::size_t>();
      sr.attacked = s.at("attacked").get<std::size_t>();
      sr.successful = s.at("successful").get<std::size_t>();
      sr.orig_acc = s.at("orig_acc").get<double>();
      sr.adv_acc = s.at("adv_acc").get<double>();
      sr.attack_success_rate = s.at("attack_success_rate").get<double>();
      sr.detection = DetectionFromJson(s.at("detection"));
      sr.mean_queries = s.at("mean_queries").get<double>();
      sr.flagged_clean_rate = s.at("flagged_clean_rate").get<double>();
      sr.mean_time_normal_us = s.at("mean_time_normal_us").get<double>();
      sr.mean_time_flagged_us = s.at("mean_time_flagged_us").get<double>();
      r.per_seed.push_back(sr);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError("report", 0, e.what());
  }
}

std::string FormatReportTable(const EvalReport& report,
                              const std::string& title) {
  std::ostringstream os;
  char line[160];
  os << title << '\n';
  std::snprintf(line, sizeof(line), "%-6s %9s %9s %9s %7s %7s %7s %9s\n",
                "seed", "Orig.Acc", "Adv.Acc", "Succ.Rate", "Det.P", "Det.R",
                "Det.F1", "Queries");
  os << line;
  for (const auto& s : report.per_seed) {
    std::snprintf(line, sizeof(line),
                  "%-6llu %9.1f %9.1f %9.1f %7.1f %7.1f %7.1f %9.1f\n",
                  static_cast<unsigned long long>(s.seed), 100 * s.orig_acc,
                  100 * s.adv_acc, 100 * s.attack_success_rate,
                  100 * s.detection.precision, 100 * s.detection.recall,
                  100 * s.detection.f1, s.mean_queries);
    os << line;
  }
  std::snprintf(line, sizeof(line),
                "%-6s %9.1f %9.1f %9.1f %7.1f %7.1f %7.1f %9.1f\n", "mean",
                100 * report.orig_acc, 100 * report.adv_acc,
                100 * report.attack_success_rate,
                100 * report.detector_precision, 100 * report.detector_recall,
                100 * report.detector_f1, report.mean_queries);
  os << line;
  return os.str();
}

ExperimentModels TrainModels(const Dataset& train, const Lexicon& lexicon,
                             const ExperimentConfig& config,
                             std::uint64_t seed) {
  if (train.empty()) throw Error("training set is empty");
  ClassifierShape shape = config.shape;
  shape.num_classes = std::max<std::size_t>(2, NumClasses(train));
  const auto& emb = lexicon.embeddings();

  TrainingConfig tc = config.training;
  tc.seed = DeriveSeed(seed, 0, 11);
  auto baseline_examples = AsTrainingExamples(train);
  TrainedModel baseline = Train(
      baseline_examples,
      DualHeadParams::Initialize(emb, shape, config.dropout_p,
                                 DeriveSeed(seed, 0, 10)),
      tc);

  TrainingSetBundle bundle = BuildTrainingBundle(
      train, MakeClassifierAttack(baseline.params, lexicon, config.attack),
      config.train_randomizer, lexicon, DeriveSeed(seed, 0, 12));

  tc.seed = DeriveSeed(seed, 0, 14);
  auto all = bundle.Flatten();
  TrainedModel adfar = Train(
      all,
      DualHeadParams::Initialize(emb, shape, config.dropout_p,
                                 DeriveSeed(seed, 0, 13)),
      tc);

  ExperimentModels out{std::move(baseline.params), std::move(adfar.params),
                       bundle.original.size(), bundle.adversarial.size(),
                       bundle.randomized_adversarial.size(), baseline.log,
                       adfar.log};
  return out;
}

}  // namespace adfar
