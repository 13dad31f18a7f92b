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

#include "natbias/bias_pipeline.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "natbias/error.h"
#include "natbias/random.h"

namespace natbias {
namespace {

std::string ProbeLabel(const ProbeGroup& group, std::string_view nationality) {
  std::string label = "probe template=" + group.template_id;
  if (!group.adjective.empty()) label += " filler=" + group.adjective;
  label += " nationality=" + std::string(nationality);
  return label;
}

double ScoreText(const SentimentModel& model, const Encoder& encoder,
                 const std::string& text, const std::string& label) {
  try {
    return Score(model, encoder.Encode(text));
  } catch (const Error& e) {
    throw e.WithContext(label);
  }
}

}  // namespace

std::vector<PairedDiff> PairedScores(const SentimentModel& model,
                                     std::span<const ProbeGroup> probes,
                                     const Encoder& encoder) {
  if (encoder.dimension() != 0 && encoder.dimension() != model.dimension) {
    throw ValidationError("encoder dimension " +
                          std::to_string(encoder.dimension()) +
                          " does not match model dimension " +
                          std::to_string(model.dimension));
  }
  std::vector<PairedDiff> out;
  for (const ProbeGroup& group : probes) {
    const double baseline = ScoreText(model, encoder, group.baseline_text,
                                      ProbeLabel(group, encoder.mask_token()));
    for (const ProbeVariant& variant : group.variants) {
      const double score = ScoreText(model, encoder, variant.text,
                                     ProbeLabel(group, variant.nationality));
      out.push_back({
          .nationality = variant.nationality,
          .template_id = group.template_id,
          .adjective = group.adjective,
          .adjective_polarity = group.adjective_polarity,
          .diff = score - baseline,
      });
    }
  }
  return out;
}

double RelativeSentiment(std::span<const double> diffs) {
  if (diffs.empty()) throw ValidationError("relative sentiment of no diffs");
  return stats::Mean(diffs);
}

std::string_view ToString(BiasClass c) {
  switch (c) {
    case BiasClass::kNegative:
      return "negative";
    case BiasClass::kNeutral:
      return "neutral";
    case BiasClass::kPositive:
      return "positive";
  }
  return "";
}

BiasClass ParseBiasClass(std::string_view text) {
  if (text == "negative") return BiasClass::kNegative;
  if (text == "neutral") return BiasClass::kNeutral;
  if (text == "positive") return BiasClass::kPositive;
  throw ValidationError("unknown bias class '" + std::string(text) + "'");
}

NationalityResult ClassifyBias(std::string_view nationality,
                               std::span<const double> diffs,
                               const ClassifyOptions& options) {
  if (diffs.empty()) {
    throw ValidationError("no paired diffs for " + std::string(nationality));
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw ValidationError("alpha must be in (0, 1)");
  }
  std::vector<double> sorted(diffs.begin(), diffs.end());
  for (const double d : sorted) {
    if (!std::isfinite(d)) throw ValidationError("non-finite paired diff");
  }
  std::sort(sorted.begin(), sorted.end());

  NationalityResult result;
  result.nationality = std::string(nationality);
  result.n_pairs = sorted.size();
  result.relative_sentiment = RelativeSentiment(sorted);
  result.wilcoxon = stats::WilcoxonSignedRank(sorted);
  if (sorted.size() >= 2) {
    result.ci = stats::BootstrapMeanCI(sorted, options.bootstrap_b,
                                       options.ci_level,
                                       DeriveSeed(options.seed, nationality));
  } else {
    result.ci = {result.relative_sentiment, result.relative_sentiment,
                 options.ci_level, 0};
  }
  result.underpowered = sorted.size() < kMinPairsForTest;
  if (result.underpowered || result.wilcoxon.p_two_sided >= options.alpha ||
      result.relative_sentiment == 0.0) {
    result.bias_class = BiasClass::kNeutral;
  } else {
    result.bias_class = result.relative_sentiment < 0.0 ? BiasClass::kNegative
                                                        : BiasClass::kPositive;
  }
  return result;
}

std::vector<NationalityResult> AggregateByNationality(
    std::span<const PairedDiff> diffs, const ClassifyOptions& options) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> grouped;
  for (const PairedDiff& d : diffs) {
    auto [it, inserted] = grouped.try_emplace(d.nationality);
    if (inserted) order.push_back(d.nationality);
    it->second.push_back(d.diff);
  }
  std::vector<NationalityResult> results;
  results.reserve(order.size());
  for (const std::string& nationality : order) {
    results.push_back(ClassifyBias(nationality, grouped[nationality], options));
  }
  return results;
}

std::vector<RobustnessCell> RobustnessMatrix(
    const std::map<std::string, std::vector<NationalityResult>>& result_sets) {
  if (result_sets.empty()) throw ValidationError("no setups to compare");
  std::map<std::string, std::map<std::string, double>> aligned;
  for (const auto& [setup, results] : result_sets) {
    auto& by_name = aligned[setup];
    for (const NationalityResult& r : results) {
      if (!by_name.emplace(r.nationality, r.relative_sentiment).second) {
        throw ValidationError("setup " + setup + " lists " + r.nationality +
                              " twice");
      }
    }
  }
  const auto& reference = aligned.begin()->second;
  for (const auto& [setup, by_name] : aligned) {
    bool same = by_name.size() == reference.size();
    for (auto a = by_name.begin(), b = reference.begin(); same && a != by_name.end();
         ++a, ++b) {
      same = a->first == b->first;
    }
    if (!same) {
      throw ValidationError("setup " + setup + " covers different nationalities than " +
                            aligned.begin()->first);
    }
  }

  std::vector<RobustnessCell> cells;
  for (auto a = aligned.begin(); a != aligned.end(); ++a) {
    std::vector<double> x;
    for (const auto& [name, value] : a->second) x.push_back(value);
    for (auto b = a; b != aligned.end(); ++b) {
      RobustnessCell cell{a->first, b->first, {}};
      if (a == b) {
        cell.pearson = {1.0, 0.0, x.size()};
      } else {
        std::vector<double> y;
        for (const auto& [name, value] : b->second) y.push_back(value);
        try {
          cell.pearson = stats::Pearson(x, y);
        } catch (const Error& e) {
          throw e.WithContext(a->first + " vs " + b->first);
        }
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace natbias
