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

#ifndef ADFAR_PIPELINE_H_
#define ADFAR_PIPELINE_H_

// Training-data construction, detect-then-randomize inference and evaluation.
//
// Training data: every original example is attacked against a baseline
// classifier; successes become adversarial examples (anomaly label 1, gold
// task label kept). The randomizer is then applied to every original and
// adversarial example, producing a randomized set that only feeds the
// classification loss.
//
// Inference: one forward pass. If the detector head says "normal", its label
// is final (path A). Otherwise the sentence is randomized once and a second
// forward pass gives the final label (path B).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adfar/attacker.h"
#include "adfar/classifier.h"
#include "adfar/dataset.h"
#include "adfar/lexicon.h"
#include "adfar/randomizer.h"

namespace adfar {

struct TrainingSetBundle {
  std::vector<TrainingExample> original;                // anomaly 0, masked in
  std::vector<TrainingExample> adversarial;             // anomaly 1, masked in
  std::vector<TrainingExample> randomized_adversarial;  // masked out

  std::vector<TrainingExample> Flatten() const;
};

// Attack hook used while building a bundle: (sentence, gold, example index).
using AttackFn =
    std::function<AttackResult(const Sentence&, std::size_t, std::size_t)>;

// Throws Error on an empty dataset. The randomizer stream for member i of
// original ++ adversarial is DeriveSeed(seed, i, kBundleStream).
TrainingSetBundle BuildTrainingBundle(const Dataset& original,
                                      const AttackFn& attack,
                                      const RandomizerConfig& randomizer,
                                      const Lexicon& lexicon,
                                      std::uint64_t seed);

// Greedy attacks against the eval-mode classification head of `victim`.
AttackFn MakeClassifierAttack(const DualHeadParams& victim,
                              const Lexicon& lexicon,
                              const AttackConfig& config);

enum class InferencePath { kA, kB };

struct FinalPrediction {
  std::size_t label = 0;
  InferencePath path = InferencePath::kA;
  bool detector_verdict = false;
  std::optional<Sentence> randomized_text;  // present iff path B
  Eigen::VectorXd p_c;                      // probabilities behind `label`
  Eigen::VectorXd first_pass_p_c;
  std::size_t forward_passes = 0;
};

FinalPrediction AdfarInfer(const Sentence& sentence,
                           const DualHeadParams& params,
                           const RandomizerConfig& randomizer,
                           const Lexicon& lexicon, Rng& rng);

// What an attacker sees when it queries the defended pipeline.
enum class Observe { kFinal, kFirstPass };

// The full defended pipeline as an attack target. Owns its rng, so each
// attack gets an independent, reproducible randomization stream.
class DefendedVictim : public Victim {
 public:
  DefendedVictim(const DualHeadParams& params,
                 const RandomizerConfig& randomizer, const Lexicon& lexicon,
                 std::uint64_t seed, Observe observe = Observe::kFinal)
      : params_(params),
        randomizer_(randomizer),
        lexicon_(lexicon),
        rng_(seed),
        observe_(observe) {}

  Eigen::VectorXd Probabilities(const Sentence& sentence) override;

 private:
  const DualHeadParams& params_;
  RandomizerConfig randomizer_;
  const Lexicon& lexicon_;
  Rng rng_;
  Observe observe_;
};

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  // Set when the named quantity had a zero denominator and was reported as 0.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
};

// Positive class = adversarial. Throws Error on empty input or a length
// mismatch.
DetectionMetrics ComputeDetectionMetrics(const std::vector<bool>& predicted,
                                         const std::vector<bool>& gold);

enum class DefenseMode { kNone, kAdfar };

struct EvalOptions {
  DefenseMode defense = DefenseMode::kAdfar;
  bool attack_enabled = true;
  AttackConfig attack;
  RandomizerConfig randomizer;  // inference-time settings (r_infer)
  Observe observe = Observe::kFinal;
  // Synonym source for the attacker; null means the defender's lexicon.
  const Lexicon* attacker_lexicon = nullptr;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t jobs = 1;
  // Timing is wall-clock and therefore excluded unless asked for; reports
  // without it are bit-reproducible.
  bool measure_timing = false;
};

struct SeedReport {
  std::uint64_t seed = 0;
  std::size_t examples = 0;
  std::size_t attacked = 0;     // clean prediction correct, attack attempted
  std::size_t successful = 0;   // attacker reported a label flip
  double orig_acc = 0.0;
  double adv_acc = 0.0;
  double attack_success_rate = 0.0;
  DetectionMetrics detection;
  double mean_queries = 0.0;
  double flagged_clean_rate = 0.0;  // clean inputs routed to path B
  double mean_time_normal_us = 0.0;
  double mean_time_flagged_us = 0.0;
};

struct EvalReport {
  std::vector<std::uint64_t> seeds;
  std::vector<SeedReport> per_seed;
  double orig_acc = 0.0;
  double adv_acc = 0.0;
  double attack_success_rate = 0.0;
  double detector_precision = 0.0;
  double detector_recall = 0.0;
  double detector_f1 = 0.0;
  double mean_queries = 0.0;
  double mean_time_normal_us = 0.0;
  double mean_time_flagged_us = 0.0;
};

// Clean accuracy and after-attack accuracy of the deployed system, averaged
// over options.seeds. With defense kAdfar the attacker queries the defended
// pipeline; the attacked text is then re-labelled by a fresh defended
// inference. Detection metrics use clean inputs (gold 0) and successful
// attacks with at least one substitution (gold 1).
EvalReport Evaluate(const Dataset& test, const DualHeadParams& params,
                    const Lexicon& lexicon, const EvalOptions& options);

inline constexpr int kReportSchemaMajor = 1;
inline constexpr int kReportSchemaMinor = 0;

std::string ReportToJson(const EvalReport& report);
// Throws VersionError for an unknown major schema version.
EvalReport ReportFromJson(const std::string& text);
// Plain-text table: one row per seed plus the mean.
std::string FormatReportTable(const EvalReport& report,
                              const std::string& title);

// Baseline training, bundle construction and multi-task training in one go.
struct ExperimentConfig {
  ClassifierShape shape;
  double dropout_p = 0.1;
  TrainingConfig training;
  AttackConfig attack;
  RandomizerConfig train_randomizer;  // r_train
};

struct ExperimentModels {
  DualHeadParams baseline;
  DualHeadParams adfar;
  std::size_t n_original = 0;
  std::size_t n_adversarial = 0;
  std::size_t n_randomized = 0;
  TrainingLog baseline_log;
  TrainingLog adfar_log;
};

// Trains both models from `train` with every random stream derived from
// `seed`.
ExperimentModels TrainModels(const Dataset& train, const Lexicon& lexicon,
                             const ExperimentConfig& config,
                             std::uint64_t seed);

std::vector<TrainingExample> AsTrainingExamples(const Dataset& data);

}  // namespace adfar

#endif  // ADFAR_PIPELINE_H_
