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

#include "natbias/classifier.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>
#include "natbias/error.h"
#include "natbias/random.h"

namespace natbias {
namespace {

using json = nlohmann::json;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct Dataset {
  Matrix x;
  Vector y;  // +1 / -1
};

Dataset ToDataset(std::span<const LabeledEmbedding> data,
                  std::span<const std::size_t> rows) {
  Dataset out;
  const std::size_t d = data.empty() ? 0 : data.front().x.dimension();
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const LabeledEmbedding& item = data[rows[r]];
    out.x.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(item.x.values.data(),
                                             static_cast<Eigen::Index>(d));
    out.y(static_cast<Eigen::Index>(r)) = item.label;
  }
  return out;
}

Dataset ToDataset(std::span<const LabeledEmbedding> data) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return ToDataset(data, rows);
}

void CheckData(std::span<const LabeledEmbedding> data) {
  if (data.empty()) throw ValidationError("no training data");
  const std::size_t d = data.front().x.dimension();
  if (d == 0) throw ValidationError("zero-dimensional embeddings");
  for (const LabeledEmbedding& item : data) {
    if (item.x.dimension() != d) {
      throw ValidationError("embedding dimension mismatch: " +
                            std::to_string(item.x.dimension()) + " vs " +
                            std::to_string(d));
    }
    if (item.label != 1 && item.label != -1) {
      throw ValidationError("labels must be +1 or -1");
    }
    for (const double v : item.x.values) {
      if (!std::isfinite(v)) throw ValidationError("non-finite embedding value");
    }
  }
}

// --- SVM ----------------------------------------------------------------------

double SvmObjectiveImpl(const Vector& w, double bias, const Dataset& data,
                        double l2) {
  const Vector margins = (data.x * w).array() + bias;
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    hinge += std::max(0.0, 1.0 - data.y(i) * margins(i));
  }
  return 0.5 * l2 * w.squaredNorm() + hinge / static_cast<double>(margins.size());
}

SvmWeights TrainSvm(const Dataset& data, const TrainOptions& options,
                    std::vector<double>& objective) {
  const Eigen::Index n = data.x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  Vector w = Vector::Zero(data.x.cols());
  double bias = 0.0;
  double current = SvmObjectiveImpl(w, bias, data, options.l2);
  objective.push_back(current);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const Vector margins = (data.x * w).array() + bias;
    Vector coeff = Vector::Zero(n);  // -y_i for margin violators
    for (Eigen::Index i = 0; i < n; ++i) {
      if (data.y(i) * margins(i) < 1.0) coeff(i) = -data.y(i) * inv_n;
    }
    const Vector grad_w = options.l2 * w + data.x.transpose() * coeff;
    const double grad_b = coeff.sum();

    double step = options.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (int halving = 0; halving < 40; ++halving) {
      const Vector w_next = w - step * grad_w;
      const double b_next = bias - step * grad_b;
      const double value = SvmObjectiveImpl(w_next, b_next, data, options.l2);
      if (value <= current) {
        w = w_next;
        bias = b_next;
        current = value;
        break;
      }
      step *= 0.5;
    }
    objective.push_back(current);
  }
  SvmWeights out;
  out.w.assign(w.data(), w.data() + w.size());
  out.bias = bias;
  return out;
}

// --- MLP ----------------------------------------------------------------------

struct MlpParams {
  Matrix w1;  // hidden x d
  Vector b1;
  Vector w2;
  double b2 = 0.0;
};

MlpParams ToParams(const MlpWeights& m, std::size_t dimension) {
  MlpParams p;
  const auto h = static_cast<Eigen::Index>(m.hidden);
  const auto d = static_cast<Eigen::Index>(dimension);
  p.w1 = Eigen::Map<const Matrix>(m.w1.data(), h, d);
  p.b1 = Eigen::Map<const Vector>(m.b1.data(), h);
  p.w2 = Eigen::Map<const Vector>(m.w2.data(), h);
  p.b2 = m.b2;
  return p;
}

MlpWeights FromParams(const MlpParams& p) {
  MlpWeights m;
  m.hidden = static_cast<std::size_t>(p.w1.rows());
  m.w1.assign(p.w1.data(), p.w1.data() + p.w1.size());
  m.b1.assign(p.b1.data(), p.b1.data() + p.b1.size());
  m.w2.assign(p.w2.data(), p.w2.data() + p.w2.size());
  m.b2 = p.b2;
  return m;
}

double MlpObjectiveImpl(const MlpParams& p, const Dataset& data, double l2,
                        MlpParams* grad) {
  const Eigen::Index n = data.x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix hidden = data.x * p.w1.transpose();
  hidden.rowwise() += p.b1.transpose();
  hidden = hidden.array().tanh();
  const Vector logits = (hidden * p.w2).array() + p.b2;

  double loss = 0.0;
  Vector dlogits(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double target = data.y(i) > 0 ? 1.0 : 0.0;
    loss += Softplus(logits(i)) - target * logits(i);
    dlogits(i) = (Sigmoid(logits(i)) - target) * inv_n;
  }
  loss = loss * inv_n + 0.5 * l2 * (p.w1.squaredNorm() + p.w2.squaredNorm());
  if (grad != nullptr) {
    grad->w2 = hidden.transpose() * dlogits + l2 * p.w2;
    grad->b2 = dlogits.sum();
    const Matrix dhidden =
        (dlogits * p.w2.transpose()).array() * (1.0 - hidden.array().square());
    grad->w1 = dhidden.transpose() * data.x + l2 * p.w1;
    grad->b1 = dhidden.colwise().sum().transpose();
  }
  return loss;
}

MlpWeights TrainMlp(const Dataset& data, const TrainOptions& options,
                    uint64_t seed, std::vector<double>& objective) {
  if (options.hidden_units == 0) throw ValidationError("MLP needs hidden units");
  const auto h = static_cast<Eigen::Index>(options.hidden_units);
  const Eigen::Index d = data.x.cols();
  Rng rng(DeriveSeed(seed, "mlp-init"));
  MlpParams p;
  p.w1.resize(h, d);
  const double s1 = std::sqrt(6.0 / static_cast<double>(d + h));
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) {
    p.w1.data()[i] = (2.0 * rng.Uniform() - 1.0) * s1;
  }
  p.b1 = Vector::Zero(h);
  p.w2.resize(h);
  const double s2 = std::sqrt(6.0 / static_cast<double>(h + 1));
  for (Eigen::Index i = 0; i < h; ++i) p.w2(i) = (2.0 * rng.Uniform() - 1.0) * s2;
  p.b2 = 0.0;

  MlpParams grad;
  for (int epoch = 0; epoch < options.mlp_epochs; ++epoch) {
    objective.push_back(MlpObjectiveImpl(p, data, options.mlp_l2, &grad));
    const double lr = options.mlp_learning_rate;
    p.w1 -= lr * grad.w1;
    p.b1 -= lr * grad.b1;
    p.w2 -= lr * grad.w2;
    p.b2 -= lr * grad.b2;
  }
  objective.push_back(MlpObjectiveImpl(p, data, options.mlp_l2, nullptr));
  return FromParams(p);
}

// Stratified seeded split: each class contributes round(count * fraction)
// held-out rows, capped so that at least one row per class trains. At least
// one row is held out overall.
void SplitRows(std::span<const LabeledEmbedding> data, double fraction,
               uint64_t seed, std::vector<std::size_t>& train,
               std::vector<std::size_t>& heldout) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(DeriveSeed(seed, "split"));
  rng.Shuffle(std::span<std::size_t>(order));

  std::size_t positives = 0;
  for (const LabeledEmbedding& item : data) positives += item.label > 0 ? 1 : 0;
  const std::size_t negatives = data.size() - positives;
  auto quota = [&](std::size_t count) {
    const auto q = static_cast<std::size_t>(
        std::llround(static_cast<double>(count) * fraction));
    return std::min(q, count - 1);
  };
  std::size_t quota_pos = quota(positives);
  std::size_t quota_neg = quota(negatives);
  if (quota_pos + quota_neg == 0) {
    (positives >= negatives ? quota_pos : quota_neg) = 1;
  }
  for (const std::size_t row : order) {
    std::size_t& q = data[row].label > 0 ? quota_pos : quota_neg;
    if (q > 0) {
      heldout.push_back(row);
      --q;
    } else {
      train.push_back(row);
    }
  }
}

std::vector<double> Margins(const SentimentModel& model,
                            std::span<const LabeledEmbedding> data,
                            std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const std::size_t row : rows) out.push_back(model.Margin(data[row].x.values));
  return out;
}

}  // namespace

std::string_view ToString(ClassifierKind kind) {
  return kind == ClassifierKind::kSvm ? "svm" : "mlp";
}

ClassifierKind ParseClassifierKind(std::string_view text) {
  if (text == "svm") return ClassifierKind::kSvm;
  if (text == "mlp") return ClassifierKind::kMlp;
  throw ValidationError("unknown classifier kind '" + std::string(text) + "'");
}

double SentimentModel::Margin(std::span<const double> x) const {
  if (x.size() != dimension) {
    throw ValidationError("embedding dimension " + std::to_string(x.size()) +
                          " does not match model dimension " +
                          std::to_string(dimension));
  }
  const Eigen::Map<const Vector> input(x.data(), static_cast<Eigen::Index>(x.size()));
  if (kind == ClassifierKind::kSvm) {
    const Eigen::Map<const Vector> w(svm.w.data(), static_cast<Eigen::Index>(svm.w.size()));
    return w.dot(input) + svm.bias;
  }
  const MlpParams p = ToParams(mlp, dimension);
  const Vector hidden = (p.w1 * input + p.b1).array().tanh();
  return hidden.dot(p.w2) + p.b2;
}

double Score(const SentimentModel& model, const EmbeddingVector& e) {
  return Sigmoid(model.calibration.a * model.Margin(e.values) +
                 model.calibration.b);
}

Calibration FitPlatt(std::span<const double> margins, std::span<const int> labels) {
  if (margins.size() != labels.size() || margins.empty()) {
    throw ValidationError("Platt scaling needs matching, non-empty inputs");
  }
  double n_pos = 0.0, n_neg = 0.0;
  for (const int label : labels) (label > 0 ? n_pos : n_neg) += 1.0;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  std::vector<double> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) targets[i] = labels[i] > 0 ? hi : lo;

  auto loss = [&](double a, double b) {
    double total = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
      const double z = a * margins[i] + b;
      total += Softplus(z) - targets[i] * z;
    }
    return total;
  };

  double a = 0.0;
  double b = std::log((n_pos + 1.0) / (n_neg + 1.0));
  double current = loss(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0.0, gb = 0.0, haa = 1e-12, hab = 0.0, hbb = 1e-12;
    for (std::size_t i = 0; i < margins.size(); ++i) {
      const double p = Sigmoid(a * margins[i] + b);
      const double r = p - targets[i];
      const double w = p * (1.0 - p);
      ga += r * margins[i];
      gb += r;
      haa += w * margins[i] * margins[i];
      hab += w * margins[i];
      hbb += w;
    }
    if (std::fabs(ga) < 1e-10 && std::fabs(gb) < 1e-10) break;
    const double det = haa * hbb - hab * hab;
    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;
    if (!std::isfinite(da) || !std::isfinite(db)) break;
    double step = 1.0;
    bool improved = false;
    while (step > 1e-10) {
      const double value = loss(a + step * da, b + step * db);
      if (value < current) {
        a += step * da;
        b += step * db;
        current = value;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {a, b};
}

std::pair<SentimentModel, TrainReport> Train(
    std::span<const LabeledEmbedding> data, ClassifierKind kind,
    const TrainOptions& options, uint64_t seed) {
  CheckData(data);
  std::size_t positives = 0;
  for (const LabeledEmbedding& item : data) positives += item.label > 0 ? 1 : 0;
  const std::size_t negatives = data.size() - positives;
  if (positives < 2 || negatives < 2) {
    throw ValidationError("training needs at least two instances per class");
  }
  if (!(options.heldout_fraction > 0.0 && options.heldout_fraction < 1.0)) {
    throw ValidationError("heldout_fraction must be in (0, 1)");
  }

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> heldout_rows;
  SplitRows(data, options.heldout_fraction, seed, train_rows, heldout_rows);
  const Dataset train = ToDataset(data, train_rows);

  SentimentModel model;
  model.kind = kind;
  model.dimension = data.front().x.dimension();
  model.seed = seed;
  TrainReport report;
  report.n_train = train_rows.size();
  report.n_heldout = heldout_rows.size();
  if (kind == ClassifierKind::kSvm) {
    model.svm = TrainSvm(train, options, report.objective);
    report.epochs = options.epochs;
    std::vector<int> labels;
    for (const std::size_t row : heldout_rows) labels.push_back(data[row].label);
    model.calibration = FitPlatt(Margins(model, data, heldout_rows), labels);
  } else {
    model.mlp = TrainMlp(train, options, seed, report.objective);
    report.epochs = options.mlp_epochs;
  }

  std::vector<LabeledEmbedding> heldout;
  heldout.reserve(heldout_rows.size());
  for (const std::size_t row : heldout_rows) heldout.push_back(data[row]);
  report.heldout_accuracy = Evaluate(model, heldout).heldout_accuracy;

  model.metadata["n_train"] = std::to_string(report.n_train);
  model.metadata["n_heldout"] = std::to_string(report.n_heldout);
  model.metadata["epochs"] = std::to_string(report.epochs);
  return {std::move(model), std::move(report)};
}

TrainReport Evaluate(const SentimentModel& model,
                     std::span<const LabeledEmbedding> heldout) {
  if (heldout.empty()) throw ValidationError("empty evaluation set");
  std::size_t correct = 0;
  for (const LabeledEmbedding& item : heldout) {
    const bool positive = Score(model, item.x) > 0.5;
    if (positive == (item.label > 0)) ++correct;
  }
  TrainReport report;
  report.n_heldout = heldout.size();
  report.heldout_accuracy =
      static_cast<double>(correct) / static_cast<double>(heldout.size());
  return report;
}

std::string ModelToJson(const SentimentModel& model) {
  json doc = json::object();
  doc["kind"] = std::string(ToString(model.kind));
  doc["dimension"] = model.dimension;
  doc["seed"] = model.seed;
  doc["calibration"] = {{"a", model.calibration.a}, {"b", model.calibration.b}};
  if (model.kind == ClassifierKind::kSvm) {
    doc["weights"] = {{"w", model.svm.w}, {"bias", model.svm.bias}};
  } else {
    doc["weights"] = {{"hidden", model.mlp.hidden},
                      {"w1", model.mlp.w1},
                      {"b1", model.mlp.b1},
                      {"w2", model.mlp.w2},
                      {"b2", model.mlp.b2}};
  }
  doc["metadata"] = model.metadata;
  return doc.dump(2);
}

SentimentModel ModelFromJson(std::string_view json_text) {
  SentimentModel model;
  try {
    const json doc = json::parse(json_text.begin(), json_text.end());
    model.kind = ParseClassifierKind(doc.at("kind").get<std::string>());
    model.dimension = doc.at("dimension").get<std::size_t>();
    model.seed = doc.at("seed").get<uint64_t>();
    model.calibration.a = doc.at("calibration").at("a").get<double>();
    model.calibration.b = doc.at("calibration").at("b").get<double>();
    const json& weights = doc.at("weights");
    if (model.kind == ClassifierKind::kSvm) {
      model.svm.w = weights.at("w").get<std::vector<double>>();
      model.svm.bias = weights.at("bias").get<double>();
      if (model.svm.w.size() != model.dimension) {
        throw ValidationError("SVM weight length differs from dimension");
      }
    } else {
      model.mlp.hidden = weights.at("hidden").get<std::size_t>();
      model.mlp.w1 = weights.at("w1").get<std::vector<double>>();
      model.mlp.b1 = weights.at("b1").get<std::vector<double>>();
      model.mlp.w2 = weights.at("w2").get<std::vector<double>>();
      model.mlp.b2 = weights.at("b2").get<double>();
      if (model.mlp.w1.size() != model.mlp.hidden * model.dimension ||
          model.mlp.b1.size() != model.mlp.hidden ||
          model.mlp.w2.size() != model.mlp.hidden) {
        throw ValidationError("MLP weight shapes are inconsistent");
      }
    }
    if (doc.contains("metadata")) {
      model.metadata =
          doc.at("metadata").get<std::map<std::string, std::string>>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  return model;
}

void SaveModel(const SentimentModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model " + path.string());
  out << ModelToJson(model) << '\n';
}

SentimentModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ModelFromJson(buffer.str());
}

namespace detail {

double SvmObjective(const SvmWeights& weights,
                    std::span<const LabeledEmbedding> data, double l2) {
  CheckData(data);
  const Dataset ds = ToDataset(data);
  const Vector w = Eigen::Map<const Vector>(weights.w.data(),
                                            static_cast<Eigen::Index>(weights.w.size()));
  return SvmObjectiveImpl(w, weights.bias, ds, l2);
}

double MlpObjective(const MlpWeights& weights,
                    std::span<const LabeledEmbedding> data, double l2,
                    MlpWeights* gradient) {
  CheckData(data);
  const Dataset ds = ToDataset(data);
  const MlpParams p = ToParams(weights, static_cast<std::size_t>(ds.x.cols()));
  if (gradient == nullptr) return MlpObjectiveImpl(p, ds, l2, nullptr);
  MlpParams grad;
  const double value = MlpObjectiveImpl(p, ds, l2, &grad);
  *gradient = FromParams(grad);
  return value;
}

}  // namespace detail

}  // namespace natbias
