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

// Acceptance checks. Prints one PASS/FAIL line per check and exits non-zero
// if any check fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "adfar/attacker.h"
#include "adfar/classifier.h"
#include "adfar/corpus.h"
#include "adfar/pipeline.h"
#include "adfar/randomizer.h"
#include "gradient_check.h"
#include "test_util.h"

namespace adfar {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

// Corpus, lexicon and one pair of trained models per seed, shared by the
// statistical checks.
struct World {
  SyntheticCorpus corpus;
  std::unique_ptr<Lexicon> lexicon;
  std::map<std::uint64_t, ExperimentModels> models;

  World() : corpus(GenerateCorpus(SyntheticCorpusSpec{})) {
    lexicon = std::make_unique<Lexicon>(corpus.embeddings, corpus.frequencies,
                                        corpus.stop_words);
    lexicon->BuildSynonymIndex(64);
    ExperimentConfig cfg;
    cfg.shape = {lexicon->embeddings().dim(), 16, 2};
    cfg.train_randomizer.r = 0.25;
    for (auto s : kSeeds) models.emplace(s, TrainModels(corpus.train, *lexicon, cfg, s));
  }
};

World& SharedWorld() {
  static World world;
  return world;
}

// Randomizer conformance: golden transcript plus invariants over fuzzed input.
Outcome RandomizerConformance() {
  const auto start = Clock::now();
  Lexicon fixture = testing::FixtureLexicon();
  RandomizerConfig golden_cfg;
  golden_cfg.r = 0.5;
  golden_cfg.f_thres = 200;
  golden_cfg.n_s = 4;
  golden_cfg.n_f = 2;
  Rng golden_rng(42);
  Sentence twelve = Tokenize("The film was a stellar , riveting yarn by an auteur .");
  RandomizedSentence g = Randomize(twelve, golden_cfg, fixture, golden_rng);
  std::ostringstream transcript;
  WriteRecords(transcript, g.records);
  transcript << "output\t" << g.sentence.raw << '\n';
  const bool golden_ok =
      twelve.tokens.size() == 12 &&
      transcript.str() ==
          testing::ReadFile(testing::DataPath("randomize_fa_golden.tsv"));

  SyntheticCorpusSpec spec;
  spec.n_train = 1;
  spec.n_test = 1;
  SyntheticCorpus c = GenerateCorpus(spec);
  Lexicon lex(c.embeddings, c.frequencies, c.stop_words);
  lex.BuildSynonymIndex(64);
  const auto& vocab = lex.embeddings().words();
  const char* punct[] = {",", ".", "!", "?", ";"};
  const char* oov[] = {"qxqx", "zzyzx", "vlorp"};
  const std::uint64_t thresholds[] = {0, 50, 200, 1000};

  Rng fuzz(2024);
  std::size_t violations = 0;
  std::string first;
  auto fail = [&](std::size_t i, const std::string& what) {
    if (violations++ == 0) first = Fmt("sentence %zu: %s", i, what.c_str());
  };
  for (std::size_t i = 0; i < 10000; ++i) {
    const std::size_t len = UniformIndex(fuzz, 21);
    std::vector<std::string> tokens;
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t kind = UniformIndex(fuzz, 10);
      if (kind == 0) {
        tokens.push_back(punct[UniformIndex(fuzz, 5)]);
      } else if (kind == 1) {
        tokens.push_back(oov[UniformIndex(fuzz, 3)]);
      } else {
        tokens.push_back(vocab[UniformIndex(fuzz, vocab.size())]);
      }
    }
    Sentence s = FromTokens(tokens);
    RandomizerConfig cfg;
    cfg.r = UniformUnit(fuzz);
    cfg.n_s = 1 + UniformIndex(fuzz, 20);
    cfg.n_f = 1 + UniformIndex(fuzz, cfg.n_s);
    cfg.frequency_aware = UniformIndex(fuzz, 2) == 1;
    cfg.f_thres = thresholds[UniformIndex(fuzz, 4)];
    Rng rng(DeriveSeed(7, i));
    RandomizedSentence out = Randomize(s, cfg, lex, rng);

    if (out.sentence.tokens.size() != s.tokens.size()) {
      fail(i, "length changed");
      continue;
    }
    std::size_t words = 0, rare = 0, common = 0;
    std::vector<bool> recorded(s.tokens.size(), false);
    for (const auto& rec : out.records) recorded[rec.position] = true;
    for (std::size_t p = 0; p < s.tokens.size(); ++p) {
      const auto& tok = s.tokens[p];
      if (IsPunctuation(tok)) {
        if (recorded[p]) fail(i, "punctuation perturbed");
        continue;
      }
      ++words;
      if (IsRare(tok, lex.frequencies(), cfg.f_thres)) {
        ++rare;
        if (!recorded[p]) fail(i, "rare word " + tok + " not considered");
      } else {
        ++common;
      }
      if (!recorded[p] && out.sentence.tokens[p] != tok) fail(i, "unrecorded change");
    }
    const std::size_t target = SubstitutionBudget(words, cfg.r);
    const std::size_t expected =
        rare + std::min(common, target > rare ? target - rare : 0);
    if (out.records.size() != expected) fail(i, "candidate count");
    if (out.records.size() > std::max(target, rare)) fail(i, "candidate ceiling");
    for (const auto& rec : out.records) {
      const bool stop = lex.stop_words().Contains(rec.original);
      if (stop != (rec.skipped == SkipReason::kStopword)) fail(i, "stop-word handling");
      if (rec.skipped) {
        if (rec.replacement != rec.original) fail(i, "skipped but changed");
        continue;
      }
      auto pool = BuildSynonymSet(rec.original, cfg, lex);
      const bool known = std::any_of(pool.begin(), pool.end(), [&](const SynonymEntry& e) {
        return e.word == rec.replacement;
      });
      if (!known) fail(i, "replacement outside the synonym set");
      if (out.sentence.tokens[rec.position] != rec.replacement) fail(i, "record mismatch");
    }
  }
  const double secs = Seconds(start);
  Outcome o;
  o.pass = golden_ok && violations == 0 && secs < 10.0;
  o.detail = Fmt("golden %s, 10000 fuzzed sentences, %zu violations, %.2f s (< 10 s)",
                 golden_ok ? "match" : "MISMATCH", violations, secs);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome GradientCheck() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    worst = std::max(worst, testing::MaxGradientRelativeError(1000 + i));
  }
  const double secs = Seconds(start);
  return {worst < 1e-4 && secs < 30.0,
          Fmt("100 instances, max relative error %.2e (< 1e-4), %.2f s (< 30 s)",
              worst, secs)};
}

Outcome LossContract() {
  Rng rng(31);
  EmbeddingTable table;
  const char* words[] = {"w0", "w1", "w2", "w3", "w4", "w5"};
  for (const char* w : words) {
    std::vector<double> v(5);
    for (auto& x : v) x = UniformReal(rng, -1, 1);
    table.Add(w, v);
  }
  std::size_t sum_violations = 0, isolation_violations = 0;
  for (int trial = 0; trial < 300; ++trial) {
    DualHeadParams p = DualHeadParams::Initialize(table, {5, 1 + UniformIndex(rng, 6), 2 + UniformIndex(rng, 2)},
                                                  0.0, DeriveSeed(31, trial));
    p.enc_w *= 10.0;
    p.cls_w *= 10.0;
    p.det_w *= 10.0;
    std::vector<TrainingExample> batch;
    const std::size_t n = 1 + UniformIndex(rng, 8);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> toks;
      for (std::size_t t = 0; t <= UniformIndex(rng, 5); ++t) toks.push_back(words[UniformIndex(rng, 6)]);
      TrainingExample ex{FromTokens(toks), UniformIndex(rng, p.num_classes()),
                         static_cast<int>(UniformIndex(rng, 2)), UniformIndex(rng, 2) == 1};
      batch.push_back(ex);
    }
    LossBreakdown l = ComputeLoss(batch, p);
    if (!(l.total == l.loss_c + l.loss_d)) ++sum_violations;

    // Flipping the anomaly labels of masked-out examples must change nothing;
    // flipping any anomaly label must leave loss_c alone.
    auto flipped = batch;
    for (auto& ex : flipped) {
      if (!ex.detector_mask) ex.anomaly_label = 1 - *ex.anomaly_label;
    }
    LossBreakdown lf = ComputeLoss(flipped, p);
    if (lf.total != l.total || lf.loss_d != l.loss_d) ++isolation_violations;
    auto all_flipped = batch;
    for (auto& ex : all_flipped) ex.anomaly_label = 1 - *ex.anomaly_label;
    if (ComputeLoss(all_flipped, p).loss_c != l.loss_c) ++isolation_violations;

    // With nothing masked in, the detector head gets no loss and no gradient.
    auto unmasked = batch;
    std::vector<EncodedExample> enc;
    for (auto& ex : unmasked) {
      ex.detector_mask = false;
      enc.push_back(EncodeExample(ex, table));
    }
    Gradients grads;
    LossBreakdown lu = LossAndGradient(enc, p, nullptr, &grads);
    if (lu.loss_d != 0.0 || grads.det_w.cwiseAbs().maxCoeff() != 0.0 ||
        grads.det_b.cwiseAbs().maxCoeff() != 0.0 || lu.total != lu.loss_c + lu.loss_d) {
      ++isolation_violations;
    }
  }
  return {sum_violations == 0 && isolation_violations == 0,
          Fmt("300 random batches, %zu sum violations, %zu mask-isolation violations",
              sum_violations, isolation_violations)};
}

Outcome AttackSoundness() {
  const auto start = Clock::now();
  World& w = SharedWorld();
  const DualHeadParams& victim_params = w.models.at(1).baseline;
  ClassifierVictim victim(victim_params);
  AttackConfig cfg;
  std::size_t attacks = 0, successes = 0, violations = 0;
  for (const auto& ex : w.corpus.test) {
    if (attacks == 500) break;
    AttackResult r = Attack(ex.sentence, ex.label, victim, *w.lexicon, cfg);
    ++attacks;
    const std::size_t recheck = Predict(r.adversarial, victim_params).label;
    if (r.success) {
      ++successes;
      if (recheck == ex.label) ++violations;
    } else if (recheck != ex.label) {
      ++violations;
    }
  }

  Lexicon fixture = testing::FixtureLexicon();
  // Linear stand-in victim: class-1 logit is a sum of word weights.
  struct Linear : Victim {
    std::map<std::string, double> w;
    Eigen::VectorXd Probabilities(const Sentence& s) override {
      double z = 0.0;
      for (const auto& t : s.tokens) {
        auto it = w.find(t);
        if (it != w.end()) z += it->second;
      }
      const double p1 = 1.0 / (1.0 + std::exp(-z));
      return Eigen::VectorXd{{1.0 - p1, p1}};
    }
  } linear;
  linear.w = {{"stellar", -1.0}, {"film", -0.5}, {"riveting", -0.5},
              {"yarn", -0.25}, {"auteur", -0.25}, {"great", 4.0}};
  Sentence five = Tokenize("stellar film riveting yarn auteur");
  std::vector<std::pair<std::size_t, std::string>> flips;
  for (std::size_t i = 0; i < five.tokens.size(); ++i) {
    for (const auto& cand : CandidateSubstitutes(five.tokens[i], fixture, cfg)) {
      auto t = five.tokens;
      t[i] = cand;
      if (Argmax(linear.Probabilities(FromTokens(t))) != 0) flips.emplace_back(i, cand);
    }
  }
  AttackResult r = Attack(five, 0, linear, fixture, cfg);
  const bool oracle_ok = flips.size() == 1 && r.success && r.substitutions.size() == 1 &&
                         r.substitutions[0].position == flips[0].first &&
                         r.substitutions[0].replacement == flips[0].second;
  const double secs = Seconds(start);
  return {violations == 0 && attacks == 500 && oracle_ok && secs < 120.0,
          Fmt("%zu attacks (%zu successes), %zu re-check violations, single-swap "
              "oracle %s, %.1f s (< 120 s)",
              attacks, successes, violations, oracle_ok ? "agrees" : "DISAGREES", secs)};
}

EvalReport EvalFor(std::uint64_t seed, const DualHeadParams& p, DefenseMode mode,
                   double r = 0.30, bool frequency_aware = true) {
  World& w = SharedWorld();
  EvalOptions opt;
  opt.defense = mode;
  opt.seeds = {seed};
  opt.randomizer.r = r;
  opt.randomizer.frequency_aware = frequency_aware;
  opt.jobs = 4;
  return Evaluate(w.corpus.test, p, *w.lexicon, opt);
}

Outcome DefenseEffectiveness() {
  const auto start = Clock::now();
  World& w = SharedWorld();
  double b_orig = 0, b_adv = 0, a_orig = 0, a_adv = 0;
  for (auto s : kSeeds) {
    EvalReport b = EvalFor(s, w.models.at(s).baseline, DefenseMode::kNone);
    EvalReport a = EvalFor(s, w.models.at(s).adfar, DefenseMode::kAdfar);
    b_orig += b.orig_acc / kSeeds.size();
    b_adv += b.adv_acc / kSeeds.size();
    a_orig += a.orig_acc / kSeeds.size();
    a_adv += a.adv_acc / kSeeds.size();
  }
  const bool attack_works = b_adv <= 0.5 * b_orig;
  const bool gain = a_adv - b_adv >= 0.15;
  const bool keeps = a_orig >= b_orig - 0.02;
  const double secs = Seconds(start);
  return {attack_works && gain && keeps && secs < 900.0,
          Fmt("baseline %.3f/%.3f (adv <= 0.5*orig: %s), ADFAR %.3f/%.3f, gain %.1f pp "
              "(>= 15), orig drop %.1f pp (<= 2), %.1f s",
              b_orig, b_adv, attack_works ? "yes" : "no", a_orig, a_adv,
              100 * (a_adv - b_adv), 100 * (b_orig - a_orig), secs)};
}

// 250 clean test inputs plus the first 250 successful attacks on the
// baseline, scored by the ADFAR detector head.
Outcome DetectionQuality() {
  World& w = SharedWorld();
  double f1 = 0.0;
  std::string per_seed;
  std::size_t fewest_attacks = 250;
  for (auto s : kSeeds) {
    const auto& m = w.models.at(s);
    std::vector<bool> predicted, gold;
    for (std::size_t i = 0; i < 250; ++i) {
      predicted.push_back(Predict(w.corpus.test[i].sentence, m.adfar).is_adversarial);
      gold.push_back(false);
    }
    ClassifierVictim victim(m.baseline);
    AttackConfig cfg;
    std::size_t found = 0;
    for (const auto& ex : w.corpus.test) {
      if (found == 250) break;
      if (Predict(ex.sentence, m.baseline).label != ex.label) continue;
      AttackResult r = Attack(ex.sentence, ex.label, victim, *w.lexicon, cfg);
      if (!r.success || r.substitutions.empty()) continue;
      ++found;
      predicted.push_back(Predict(r.adversarial, m.adfar).is_adversarial);
      gold.push_back(true);
    }
    fewest_attacks = std::min(fewest_attacks, found);
    DetectionMetrics d = ComputeDetectionMetrics(predicted, gold);
    f1 += d.f1 / kSeeds.size();
    per_seed += Fmt(" %.3f", d.f1);
  }
  return {f1 >= 0.75 && fewest_attacks == 250,
          Fmt("mean F1 %.3f (>= 0.75), per seed:%s, attacked samples per seed >= %zu",
              f1, per_seed.c_str(), fewest_attacks)};
}

Outcome Overhead() {
  World& w = SharedWorld();
  const DualHeadParams& p = w.models.at(1).adfar;
  RandomizerConfig rc;
  double best_plain = 1e300, best_defended = 1e300;
  std::size_t path_b = 0, bad_passes = 0;
  std::size_t sink = 0;
  for (int rep = 0; rep < 7; ++rep) {
    auto t0 = Clock::now();
    for (const auto& ex : w.corpus.test) sink += Predict(ex.sentence, p).label;
    best_plain = std::min(best_plain, Seconds(t0));
    Rng rng(DeriveSeed(1, rep));
    std::size_t b = 0;
    t0 = Clock::now();
    for (const auto& ex : w.corpus.test) {
      FinalPrediction f = AdfarInfer(ex.sentence, p, rc, *w.lexicon, rng);
      sink += f.label;
      if (f.path == InferencePath::kB) {
        ++b;
        if (f.forward_passes != 2) ++bad_passes;
      } else if (f.forward_passes != 1) {
        ++bad_passes;
      }
    }
    best_defended = std::min(best_defended, Seconds(t0));
    path_b = b;
  }
  const double ratio = best_defended / best_plain;
  return {ratio <= 1.5 && bad_passes == 0,
          Fmt("defended/plain time %.2fx (<= 1.5x) over %zu clean inputs, %zu on path B, "
              "%zu pass-count violations%s",
              ratio, w.corpus.test.size(), path_b, bad_passes, sink == 0 ? "" : "")};
}

Outcome SweepShape() {
  World& w = SharedWorld();
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.05 * i);
  std::vector<double> adv(grid.size(), 0.0);
  double no_fa = 0.0, fa = 0.0;
  for (auto s : kSeeds) {
    const auto& p = w.models.at(s).adfar;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      adv[g] += EvalFor(s, p, DefenseMode::kAdfar, grid[g]).adv_acc / kSeeds.size();
    }
    fa += EvalFor(s, p, DefenseMode::kAdfar, 0.30, true).adv_acc / kSeeds.size();
    no_fa += EvalFor(s, p, DefenseMode::kAdfar, 0.30, false).adv_acc / kSeeds.size();
  }
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(adv.begin(), adv.end()) - adv.begin());
  const bool interior = best != 0 && best + 1 != grid.size();
  const bool varies = adv[best] - adv[0] >= 0.01;
  const bool dominates = fa > no_fa;
  std::string row;
  for (double a : adv) row += Fmt(" %.3f", a);
  return {interior && varies && dominates,
          Fmt("adv_acc over r=0..0.5:%s; max at r=%.2f (interior: %s), max - adv(r=0) = "
              "%.3f (>= 0.01); frequency-aware %.3f vs plain %.3f at r=0.30",
              row.c_str(), grid[best], interior ? "yes" : "no", adv[best] - adv[0], fa,
              no_fa)};
}

Outcome Determinism() {
  World& w = SharedWorld();
  EvalOptions opt;
  opt.seeds = kSeeds;
  const auto& p = w.models.at(1).adfar;
  const std::string a = ReportToJson(Evaluate(w.corpus.test, p, *w.lexicon, opt));
  const std::string b = ReportToJson(Evaluate(w.corpus.test, p, *w.lexicon, opt));
  opt.jobs = 4;
  const std::string c = ReportToJson(Evaluate(w.corpus.test, p, *w.lexicon, opt));
  return {a == b && a == c,
          Fmt("two serial runs %s, 4-worker run %s (%zu bytes)",
              a == b ? "identical" : "DIFFER", a == c ? "identical" : "DIFFERS", a.size())};
}

}  // namespace
}  // namespace adfar

int main() {
  using adfar::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"randomizer-conformance", adfar::RandomizerConformance},
      {"gradient-check", adfar::GradientCheck},
      {"loss-contract", adfar::LossContract},
      {"attack-soundness", adfar::AttackSoundness},
      {"defense-effectiveness", adfar::DefenseEffectiveness},
      {"detection-quality", adfar::DetectionQuality},
      {"inference-overhead", adfar::Overhead},
      {"r-sweep", adfar::SweepShape},
      {"determinism", adfar::Determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : checks) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(checks.size()) - failures,
              checks.size());
  return failures == 0 ? 0 : 1;
}
