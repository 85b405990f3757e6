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

#include "adfar/classifier.h"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "adfar/error.h"

namespace adfar {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::json;

void FillUniform(MatrixXd& m, Rng& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = UniformReal(rng, -0.1, 0.1);
    }
  }
}

// Inverted-dropout scale factors: 0 for dropped units, 1/(1-p) for kept ones.
VectorXd DropoutMask(Eigen::Index size, double p, Rng* rng) {
  VectorXd mask = VectorXd::Ones(size);
  if (rng == nullptr || p <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < size; ++i) {
    mask(i) = UniformUnit(*rng) < p ? 0.0 : keep_scale;
  }
  return mask;
}

double LogSumExp(const VectorXd& logits) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

json MatrixToJson(const MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

MatrixXd MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error("checkpoint matrix has wrong element count");
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  }
  return m;
}

VectorXd VectorFromJson(const json& j) {
  MatrixXd m = MatrixFromJson(j);
  if (m.cols() != 1) throw Error("checkpoint vector must have one column");
  return m.col(0);
}

// Adam moment state for one parameter block.
template <typename Param>
struct Moments {
  Param m, v;
  explicit Moments(const Param& like)
      : m(Param::Zero(like.rows(), like.cols())),
        v(Param::Zero(like.rows(), like.cols())) {}
};

template <typename Param>
void AdamWStep(Param& param, const Param& grad, Moments<Param>& mom,
               const TrainingConfig& cfg, std::size_t t, bool decay) {
  mom.m = cfg.beta1 * mom.m + (1.0 - cfg.beta1) * grad;
  mom.v = cfg.beta2 * mom.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  if (decay) param *= (1.0 - cfg.learning_rate * cfg.weight_decay);
  param.array() -= cfg.learning_rate * (mom.m.array() / c1) /
                   ((mom.v.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace

bool DualHeadParams::AllFinite() const {
  return enc_w.allFinite() && enc_b.allFinite() && cls_w.allFinite() &&
         cls_b.allFinite() && det_w.allFinite() && det_b.allFinite();
}

void DualHeadParams::CheckShapes() const {
  const auto h = enc_w.rows();
  if (enc_b.size() != h || cls_w.cols() != h || det_w.cols() != h ||
      cls_b.size() != cls_w.rows() || det_w.rows() != 2 || det_b.size() != 2) {
    throw Error("inconsistent classifier parameter shapes");
  }
  if (embeddings != nullptr &&
      static_cast<std::size_t>(enc_w.cols()) != embeddings->dim()) {
    throw Error("encoder input width does not match embedding dimension");
  }
}

DualHeadParams DualHeadParams::Initialize(const EmbeddingTable& embeddings,
                                          const ClassifierShape& shape,
                                          double dropout_p,
                                          std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(
      shape.input_dim != 0 ? shape.input_dim : embeddings.dim());
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  const auto c = static_cast<Eigen::Index>(shape.num_classes);
  if (d == 0 || h == 0 || c < 2) throw Error("invalid classifier shape");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
  DualHeadParams p;
  p.embeddings = &embeddings;
  p.dropout_p = dropout_p;
  p.enc_w.resize(h, d);
  p.cls_w.resize(c, h);
  p.det_w.resize(2, h);
  Rng rng(seed);
  FillUniform(p.enc_w, rng);
  FillUniform(p.cls_w, rng);
  FillUniform(p.det_w, rng);
  p.enc_b = VectorXd::Zero(h);
  p.cls_b = VectorXd::Zero(c);
  p.det_b = VectorXd::Zero(2);
  p.CheckShapes();
  return p;
}

VectorXd MeanEmbedding(const Sentence& sentence,
                       const EmbeddingTable& embeddings) {
  VectorXd sum = VectorXd::Zero(static_cast<Eigen::Index>(embeddings.dim()));
  std::size_t count = 0;
  for (const auto& tok : sentence.tokens) {
    auto v = embeddings.Find(tok);
    if (!v) continue;
    for (std::size_t i = 0; i < v->size(); ++i) sum(i) += (*v)[i];
    ++count;
  }
  if (count > 0) sum /= static_cast<double>(count);
  return sum;
}

VectorXd Encode(const Sentence& sentence, const DualHeadParams& params) {
  VectorXd x = MeanEmbedding(sentence, *params.embeddings);
  return (params.enc_w * x + params.enc_b).array().tanh();
}

VectorXd Softmax(const VectorXd& logits) {
  VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

std::size_t Argmax(const VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

ForwardOutput ForwardFeatures(const VectorXd& features,
                              const DualHeadParams& params, Rng* dropout_rng) {
  ForwardOutput out;
  out.h0 = (params.enc_w * features + params.enc_b).array().tanh();
  const auto h = out.h0.size();
  VectorXd mask_c = DropoutMask(h, params.dropout_p, dropout_rng);
  VectorXd mask_d = DropoutMask(h, params.dropout_p, dropout_rng);
  out.p_c = Softmax(params.cls_w * out.h0.cwiseProduct(mask_c) + params.cls_b);
  out.p_d = Softmax(params.det_w * out.h0.cwiseProduct(mask_d) + params.det_b);
  return out;
}

ForwardOutput Forward(const Sentence& sentence, const DualHeadParams& params,
                      Rng* dropout_rng) {
  return ForwardFeatures(MeanEmbedding(sentence, *params.embeddings), params,
                         dropout_rng);
}

EncodedExample EncodeExample(const TrainingExample& example,
                             const EmbeddingTable& embeddings) {
  if (example.detector_mask && !example.anomaly_label) {
    throw Error("detector-masked example lacks an anomaly label");
  }
  return {MeanEmbedding(example.sentence, embeddings), example.label,
          example.anomaly_label.value_or(0), example.detector_mask};
}

LossBreakdown LossAndGradient(std::span<const EncodedExample> batch,
                              const DualHeadParams& params, Rng* dropout_rng,
                              Gradients* grads) {
  if (batch.empty()) throw Error("loss of an empty batch");
  const auto n_c = static_cast<double>(batch.size());
  std::size_t masked = 0;
  for (const auto& ex : batch) masked += ex.detector_mask ? 1 : 0;
  const double n_d = static_cast<double>(masked);

  if (grads != nullptr) {
    grads->enc_w = MatrixXd::Zero(params.enc_w.rows(), params.enc_w.cols());
    grads->enc_b = VectorXd::Zero(params.enc_b.size());
    grads->cls_w = MatrixXd::Zero(params.cls_w.rows(), params.cls_w.cols());
    grads->cls_b = VectorXd::Zero(params.cls_b.size());
    grads->det_w = MatrixXd::Zero(params.det_w.rows(), params.det_w.cols());
    grads->det_b = VectorXd::Zero(params.det_b.size());
  }

  double sum_c = 0.0;
  double sum_d = 0.0;
  for (const auto& ex : batch) {
    const VectorXd h = (params.enc_w * ex.features + params.enc_b).array().tanh();
    const VectorXd mask_c = DropoutMask(h.size(), params.dropout_p, dropout_rng);
    const VectorXd mask_d = DropoutMask(h.size(), params.dropout_p, dropout_rng);
    const VectorXd hc = h.cwiseProduct(mask_c);
    const VectorXd hd = h.cwiseProduct(mask_d);

    const VectorXd logits_c = params.cls_w * hc + params.cls_b;
    const auto y = static_cast<Eigen::Index>(ex.label);
    if (y >= logits_c.size()) throw Error("label out of range");
    sum_c += LogSumExp(logits_c) - logits_c(y);

    VectorXd logits_d;
    if (ex.detector_mask) {
      logits_d = params.det_w * hd + params.det_b;
      sum_d += LogSumExp(logits_d) - logits_d(ex.anomaly_label);
    }
    if (grads == nullptr) continue;

    VectorXd g_c = Softmax(logits_c);
    g_c(y) -= 1.0;
    g_c /= n_c;
    grads->cls_w += g_c * hc.transpose();
    grads->cls_b += g_c;
    VectorXd dh = (params.cls_w.transpose() * g_c).cwiseProduct(mask_c);

    if (ex.detector_mask) {
      VectorXd g_d = Softmax(logits_d);
      g_d(ex.anomaly_label) -= 1.0;
      g_d /= n_d;
      grads->det_w += g_d * hd.transpose();
      grads->det_b += g_d;
      dh += (params.det_w.transpose() * g_d).cwiseProduct(mask_d);
    }
    const VectorXd dz = dh.cwiseProduct((1.0 - h.array().square()).matrix());
    grads->enc_w += dz * ex.features.transpose();
    grads->enc_b += dz;
  }

  LossBreakdown loss;
  loss.loss_c = sum_c / n_c;
  loss.loss_d = masked > 0 ? sum_d / n_d : 0.0;
  loss.total = loss.loss_c + loss.loss_d;
  return loss;
}

LossBreakdown ComputeLoss(std::span<const TrainingExample> batch,
                          const DualHeadParams& params, Rng* dropout_rng) {
  std::vector<EncodedExample> encoded;
  encoded.reserve(batch.size());
  for (const auto& ex : batch) {
    encoded.push_back(EncodeExample(ex, *params.embeddings));
  }
  return LossAndGradient(encoded, params, dropout_rng, nullptr);
}

TrainedModel Train(std::span<const TrainingExample> examples,
                   DualHeadParams initial, const TrainingConfig& config) {
  if (examples.empty()) throw Error("training set is empty");
  if (config.batch_size == 0) throw ConfigError("batch_size must be positive");
  initial.CheckShapes();

  std::vector<EncodedExample> encoded;
  encoded.reserve(examples.size());
  for (const auto& ex : examples) {
    encoded.push_back(EncodeExample(ex, *initial.embeddings));
  }

  TrainedModel out{std::move(initial), {}};
  DualHeadParams& p = out.params;
  out.log.initial_loss = LossAndGradient(encoded, p, nullptr, nullptr).total;

  Rng shuffle_rng(DeriveSeed(config.seed, 0, 1));
  Rng dropout_rng(DeriveSeed(config.seed, 0, 2));
  Moments<MatrixXd> m_enc_w(p.enc_w), m_cls_w(p.cls_w), m_det_w(p.det_w);
  Moments<VectorXd> m_enc_b(p.enc_b), m_cls_b(p.cls_b), m_det_b(p.det_b);

  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EncodedExample> batch;
  Gradients g;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[UniformIndex(shuffle_rng, i)]);
    }
    double epoch_sum = 0.0;
    std::size_t epoch_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(encoded[order[k]]);
      ++step;
      LossBreakdown loss = LossAndGradient(batch, p, &dropout_rng, &g);
      if (!std::isfinite(loss.total)) {
        throw TrainingError("non-finite loss at step " + std::to_string(step) +
                            " (epoch " + std::to_string(epoch + 1) + ")");
      }
      epoch_sum += loss.total;
      ++epoch_batches;
      AdamWStep(p.enc_w, g.enc_w, m_enc_w, config, step, true);
      AdamWStep(p.enc_b, g.enc_b, m_enc_b, config, step, false);
      AdamWStep(p.cls_w, g.cls_w, m_cls_w, config, step, true);
      AdamWStep(p.cls_b, g.cls_b, m_cls_b, config, step, false);
      AdamWStep(p.det_w, g.det_w, m_det_w, config, step, true);
      AdamWStep(p.det_b, g.det_b, m_det_b, config, step, false);
      if (!p.AllFinite()) {
        throw TrainingError("non-finite parameters after step " +
                            std::to_string(step));
      }
    }
    out.log.epoch_mean_loss.push_back(epoch_sum /
                                      static_cast<double>(epoch_batches));
  }
  out.log.steps = step;
  out.log.final_loss = LossAndGradient(encoded, p, nullptr, nullptr).total;
  return out;
}

Prediction Predict(const Sentence& sentence, const DualHeadParams& params) {
  ForwardOutput f = Forward(sentence, params, nullptr);
  Prediction out;
  out.label = Argmax(f.p_c);
  out.is_adversarial = Argmax(f.p_d) == 1;
  out.p_c = std::move(f.p_c);
  out.p_d = std::move(f.p_d);
  return out;
}

void SaveCheckpoint(const std::string& path, const DualHeadParams& params) {
  params.CheckShapes();
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["config"] = {{"input_dim", params.input_dim()},
                 {"hidden", params.hidden()},
                 {"num_classes", params.num_classes()},
                 {"dropout_p", params.dropout_p}};
  j["embedding_source"] = params.embedding_source;
  j["enc_w"] = MatrixToJson(params.enc_w);
  j["enc_b"] = MatrixToJson(params.enc_b);
  j["cls_w"] = MatrixToJson(params.cls_w);
  j["cls_b"] = MatrixToJson(params.cls_b);
  j["det_w"] = MatrixToJson(params.det_w);
  j["det_b"] = MatrixToJson(params.det_b);
  std::ofstream out(path);
  if (!out) throw WriteError(path);
  out << j.dump(1) << '\n';
  if (!out) throw WriteError(path);
}

DualHeadParams LoadCheckpoint(const std::string& path,
                              const EmbeddingTable& embeddings) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw VersionError("checkpoint format_version " + std::to_string(version) +
                         " is not supported (expected " +
                         std::to_string(kCheckpointFormatVersion) + ")");
    }
    DualHeadParams p;
    p.embeddings = &embeddings;
    p.embedding_source = j.value("embedding_source", "");
    p.dropout_p = j.at("config").at("dropout_p").get<double>();
    p.enc_w = MatrixFromJson(j.at("enc_w"));
    p.enc_b = VectorFromJson(j.at("enc_b"));
    p.cls_w = MatrixFromJson(j.at("cls_w"));
    p.cls_b = VectorFromJson(j.at("cls_b"));
    p.det_w = MatrixFromJson(j.at("det_w"));
    p.det_b = VectorFromJson(j.at("det_b"));
    if (static_cast<std::size_t>(p.enc_w.cols()) != embeddings.dim()) {
      throw VersionError("checkpoint expects " +
                         std::to_string(p.enc_w.cols()) +
                         "-dimensional embeddings, table has " +
                         std::to_string(embeddings.dim()));
    }
    p.CheckShapes();
    return p;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace adfar
