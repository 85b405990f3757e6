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

#ifndef ADFAR_CLASSIFIER_H_
#define ADFAR_CLASSIFIER_H_

// Dual-head text classifier.
//
// The encoder is deliberately small: the sentence representation is
//
//   h0 = tanh(W_enc * mean(frozen embeddings of in-vocabulary tokens) + b_enc)
//
// standing in for the [CLS] vector of a pre-trained transformer. Two softmax
// heads read h0 through independent dropout masks:
//
//   p_c = softmax(W_c * dropout(h0) + b_c)    task label, C classes
//   p_d = softmax(W_d * dropout(h0) + b_d)    0 = normal, 1 = attacked
//
// and training minimises loss_c + loss_d, where loss_d only averages over
// examples whose detector_mask is set.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adfar/lexicon.h"
#include "adfar/random.h"
#include "adfar/text.h"

namespace adfar {

inline constexpr int kCheckpointFormatVersion = 1;

struct ClassifierShape {
  std::size_t input_dim = 0;
  std::size_t hidden = 16;
  std::size_t num_classes = 2;
};

struct DualHeadParams {
  const EmbeddingTable* embeddings = nullptr;  // frozen features, not owned
  std::string embedding_source;                // path the table came from

  Eigen::MatrixXd enc_w;  // H x d
  Eigen::VectorXd enc_b;  // H
  Eigen::MatrixXd cls_w;  // C x H
  Eigen::VectorXd cls_b;  // C
  Eigen::MatrixXd det_w;  // 2 x H
  Eigen::VectorXd det_b;  // 2
  double dropout_p = 0.1;

  std::size_t input_dim() const { return static_cast<std::size_t>(enc_w.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(enc_w.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(cls_w.rows()); }

  bool AllFinite() const;
  // Throws Error when shapes disagree.
  void CheckShapes() const;

  // Weights uniform in [-0.1, 0.1] from `seed`, biases zero.
  static DualHeadParams Initialize(const EmbeddingTable& embeddings,
                                   const ClassifierShape& shape,
                                   double dropout_p, std::uint64_t seed);
};

struct TrainingExample {
  Sentence sentence;
  std::size_t label = 0;
  std::optional<int> anomaly_label;  // 0 normal, 1 attacked
  bool detector_mask = false;
};

struct ForwardOutput {
  Eigen::VectorXd h0;
  Eigen::VectorXd p_c;
  Eigen::VectorXd p_d;
};

// Mean of the embeddings of in-vocabulary tokens; zero when there are none.
Eigen::VectorXd MeanEmbedding(const Sentence& sentence,
                              const EmbeddingTable& embeddings);

Eigen::VectorXd Encode(const Sentence& sentence, const DualHeadParams& params);

// Eval mode when `dropout_rng` is null; train mode draws dropout masks from it.
ForwardOutput Forward(const Sentence& sentence, const DualHeadParams& params,
                      Rng* dropout_rng = nullptr);
ForwardOutput ForwardFeatures(const Eigen::VectorXd& features,
                              const DualHeadParams& params,
                              Rng* dropout_rng = nullptr);

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);
// Index of the largest entry; the lowest index wins ties.
std::size_t Argmax(const Eigen::VectorXd& v);

struct LossBreakdown {
  double total = 0.0;
  double loss_c = 0.0;
  double loss_d = 0.0;
};

// An example with its mean embedding precomputed. The embeddings are frozen,
// so training encodes every sentence once.
struct EncodedExample {
  Eigen::VectorXd features;
  std::size_t label = 0;
  int anomaly_label = 0;
  bool detector_mask = false;
};

EncodedExample EncodeExample(const TrainingExample& example,
                             const EmbeddingTable& embeddings);

struct Gradients {
  Eigen::MatrixXd enc_w;
  Eigen::VectorXd enc_b;
  Eigen::MatrixXd cls_w;
  Eigen::VectorXd cls_b;
  Eigen::MatrixXd det_w;
  Eigen::VectorXd det_b;
};

// Throws Error on an empty batch.
LossBreakdown ComputeLoss(std::span<const TrainingExample> batch,
                          const DualHeadParams& params,
                          Rng* dropout_rng = nullptr);

// Loss and its gradient with respect to every trainable parameter.
LossBreakdown LossAndGradient(std::span<const EncodedExample> batch,
                              const DualHeadParams& params, Rng* dropout_rng,
                              Gradients* grads);

struct TrainingConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 16;
  double learning_rate = 1e-2;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

struct TrainingLog {
  double initial_loss = 0.0;  // eval-mode loss over the full set
  double final_loss = 0.0;
  std::vector<double> epoch_mean_loss;  // mean train-mode minibatch loss
  std::size_t steps = 0;
};

struct TrainedModel {
  DualHeadParams params;
  TrainingLog log;
};

// Mini-batch AdamW with decoupled weight decay on the weight matrices.
// Deterministic given config.seed. Throws TrainingError naming the step if
// the loss becomes non-finite.
TrainedModel Train(std::span<const TrainingExample> examples,
                   DualHeadParams initial, const TrainingConfig& config);

struct Prediction {
  std::size_t label = 0;
  bool is_adversarial = false;
  Eigen::VectorXd p_c;
  Eigen::VectorXd p_d;
};

Prediction Predict(const Sentence& sentence, const DualHeadParams& params);

void SaveCheckpoint(const std::string& path, const DualHeadParams& params);
// Throws FileNotFoundError, ParseError for malformed JSON, and VersionError
// for an unknown format_version or an embedding table of the wrong width.
DualHeadParams LoadCheckpoint(const std::string& path,
                              const EmbeddingTable& embeddings);

}  // namespace adfar

#endif  // ADFAR_CLASSIFIER_H_
