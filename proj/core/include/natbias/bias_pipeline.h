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

// Probe scoring and aggregation.
//
// Every probe variant is scored against the masked baseline of its group:
// diff = score(variant) - score(baseline). A nationality's relative
// sentiment is the flat mean of its diffs over all (template, filler)
// groups; a two-sided Wilcoxon signed-rank test on the same diffs decides
// whether it is biased, and the sign of the mean gives the direction.

#ifndef NATBIAS_BIAS_PIPELINE_H_
#define NATBIAS_BIAS_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "natbias/classifier.h"
#include "natbias/embedding.h"
#include "natbias/lexica.h"
#include "natbias/stats.h"

namespace natbias {

struct PairedDiff {
  std::string nationality;
  std::string template_id;
  std::string adjective;
  int adjective_polarity = 0;  // recorded only; never flips the sign
  double diff = 0.0;           // score(variant) - score(baseline)
};

// Scores each group's baseline once and every variant against it. Encoder
// failures are rethrown with the template, filler and nationality involved.
std::vector<PairedDiff> PairedScores(const SentimentModel& model,
                                     std::span<const ProbeGroup> probes,
                                     const Encoder& encoder);

double RelativeSentiment(std::span<const double> diffs);

enum class BiasClass { kNegative, kNeutral, kPositive };

std::string_view ToString(BiasClass c);
BiasClass ParseBiasClass(std::string_view text);

// Minimum pair count for which a two-sided exact test can reach p < 0.05.
inline constexpr std::size_t kMinPairsForTest = 6;

struct ClassifyOptions {
  double alpha = 0.05;
  std::size_t bootstrap_b = 1000;
  double ci_level = 0.95;
  uint64_t seed = 0;
};

struct NationalityResult {
  std::string nationality;
  double relative_sentiment = 0.0;
  stats::BootstrapCI ci;
  stats::WilcoxonResult wilcoxon;
  BiasClass bias_class = BiasClass::kNeutral;
  std::size_t n_pairs = 0;
  bool underpowered = false;  // fewer than kMinPairsForTest diffs
};

// Diffs are aggregated in sorted order, so the result does not depend on
// probe order. The bootstrap seed is derived from (options.seed,
// nationality).
NationalityResult ClassifyBias(std::string_view nationality,
                               std::span<const double> diffs,
                               const ClassifyOptions& options);

// Groups `diffs` by nationality and classifies each; results follow the
// order in which nationalities first appear.
std::vector<NationalityResult> AggregateByNationality(
    std::span<const PairedDiff> diffs, const ClassifyOptions& options);

struct RobustnessCell {
  std::string setup_a;
  std::string setup_b;
  stats::PearsonResult pearson;
};

// Pearson correlation of relative-sentiment vectors, aligned by nationality,
// for every unordered pair of setups including each setup with itself
// (r = 1). Cells are ordered (a, b) with a <= b in map order. All setups
// must cover the same nationalities.
std::vector<RobustnessCell> RobustnessMatrix(
    const std::map<std::string, std::vector<NationalityResult>>& result_sets);

}  // namespace natbias

#endif  // NATBIAS_BIAS_PIPELINE_H_
