// Copyright 2026 The natbias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sentiment head trained on frozen sentence embeddings.
//
// Two model kinds share one scoring contract, a positivity in [0, 1]:
//
//   svm  linear model, L2-regularized hinge loss, full-batch subgradient
//        descent with step lr/sqrt(t). A step that would raise the
//        objective is halved until it does not, so the objective trace is
//        non-increasing. Scores are sigmoid(a * margin + b) with (a, b)
//        fitted by Platt scaling on the held-out margins.
//   mlp  one tanh hidden layer and a sigmoid output unit trained by
//        full-batch gradient descent on cross-entropy; the output unit is
//        the score and the calibration stays at (1, 0).
//
// Training is single-threaded and a pure function of (data, kind, options,
// seed). Trained models are immutable values.

#ifndef NATBIAS_CLASSIFIER_H_
#define NATBIAS_CLASSIFIER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "natbias/embedding.h"

namespace natbias {

enum class ClassifierKind { kSvm, kMlp };

std::string_view ToString(ClassifierKind kind);
ClassifierKind ParseClassifierKind(std::string_view text);

struct Calibration {
  double a = 1.0;
  double b = 0.0;
};

struct SvmWeights {
  std::vector<double> w;
  double bias = 0.0;
};

struct MlpWeights {
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x dimension, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
};

struct SentimentModel {
  ClassifierKind kind = ClassifierKind::kSvm;
  std::size_t dimension = 0;
  uint64_t seed = 0;
  Calibration calibration;
  SvmWeights svm;  // used when kind == kSvm
  MlpWeights mlp;  // used when kind == kMlp
  std::map<std::string, std::string> metadata;

  // Signed decision value: w.x + bias for the SVM, the output logit for the
  // MLP. Throws on dimension mismatch.
  double Margin(std::span<const double> x) const;
};

struct TrainOptions {
  // SVM
  double l2 = 1e-3;
  int epochs = 200;
  double learning_rate = 0.1;
  // MLP
  std::size_t hidden_units = 100;
  int mlp_epochs = 300;
  double mlp_learning_rate = 0.5;
  double mlp_l2 = 1e-4;
  // Fraction held out (per class, seeded) for calibration and accuracy.
  double heldout_fraction = 0.1;
};

struct TrainReport {
  std::size_t n_train = 0;
  std::size_t n_heldout = 0;
  double heldout_accuracy = 0.0;
  int epochs = 0;
  // Training objective before the first epoch and after each one.
  std::vector<double> objective;
};

struct LabeledEmbedding {
  EmbeddingVector x;
  int label = 0;  // +1 or -1
};

// Requires at least two instances per class and one dimension throughout.
std::pair<SentimentModel, TrainReport> Train(
    std::span<const LabeledEmbedding> data, ClassifierKind kind,
    const TrainOptions& options, uint64_t seed);

// Calibrated positivity in [0, 1].
double Score(const SentimentModel& model, const EmbeddingVector& e);

// Accuracy of (score > 0.5) against label > 0 on `heldout` (non-empty).
TrainReport Evaluate(const SentimentModel& model,
                     std::span<const LabeledEmbedding> heldout);

// Platt scaling: fits sigmoid(a * margin + b) to labels using the smoothed
// targets (N+ + 1) / (N+ + 2) and 1 / (N- + 2).
Calibration FitPlatt(std::span<const double> margins, std::span<const int> labels);

// Model file: {kind, dimension, weights, calibration, seed, metadata}.
std::string ModelToJson(const SentimentModel& model);
SentimentModel ModelFromJson(std::string_view json_text);
void SaveModel(const SentimentModel& model, const std::filesystem::path& path);
SentimentModel LoadModel(const std::filesystem::path& path);

namespace detail {

// Hinge objective l2/2 |w|^2 + mean(max(0, 1 - y (w.x + bias))).
double SvmObjective(const SvmWeights& weights,
                    std::span<const LabeledEmbedding> data, double l2);

// Mean cross-entropy plus l2/2 (|W1|^2 + |w2|^2); fills `gradient` (same
// shape as `weights`) when non-null.
double MlpObjective(const MlpWeights& weights,
                    std::span<const LabeledEmbedding> data, double l2,
                    MlpWeights* gradient);

}  // namespace detail

}  // namespace natbias

#endif  // NATBIAS_CLASSIFIER_H_
