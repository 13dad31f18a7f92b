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

// Statistical kernel: Wilcoxon signed-rank test, Pearson correlation with a
// Student-t significance test, and percentile bootstrap intervals.

#ifndef NATBIAS_STATS_H_
#define NATBIAS_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace natbias::stats {

enum class WilcoxonMode { kExact, kNormalApprox };

// Mode selection: kAuto uses the exact null distribution up to
// kExactWilcoxonLimit non-zero differences and the normal approximation
// beyond it.
enum class WilcoxonMethod { kAuto, kExact, kNormalApprox };

inline constexpr std::size_t kExactWilcoxonLimit = 25;

struct WilcoxonResult {
  double w_statistic = 0.0;  // sum of ranks of positive differences
  std::size_t n_effective = 0;
  double p_two_sided = 1.0;
  WilcoxonMode mode = WilcoxonMode::kExact;
  bool degenerate = false;  // every difference was zero
};

// Two-sided signed-rank test of H0: differences symmetric about zero.
// Zero differences are dropped; tied magnitudes share average ranks. The
// exact mode counts sign assignments over the (tie-aware) rank multiset.
// The approximation uses the tie-corrected variance and a 0.5 continuity
// correction. When every difference is zero the result is flagged
// degenerate with p = 1.
WilcoxonResult WilcoxonSignedRank(std::span<const double> diffs,
                                  WilcoxonMethod method = WilcoxonMethod::kAuto);

struct PearsonResult {
  double r = 0.0;
  double p_two_sided = 1.0;
  std::size_t n = 0;
};

// Throws Error(kValidation) for unequal lengths, n < 3 or zero variance.
PearsonResult Pearson(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double StudentTTwoSided(double t, double dof);

// Standard normal upper tail P(Z >= z).
double NormalUpperTail(double z);

struct BootstrapCI {
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;
  std::size_t b = 0;
};

// Percentile interval of the resampled mean. Resample k draws from its own
// generator seeded from (seed, k), so the result does not depend on the
// order resamples are evaluated in.
BootstrapCI BootstrapMeanCI(std::span<const double> samples, std::size_t b,
                            double level, uint64_t seed);

double Mean(std::span<const double> values);

// Linear-interpolated quantile of sorted data, q in [0, 1].
double QuantileSorted(std::span<const double> sorted, double q);

}  // namespace natbias::stats

#endif  // NATBIAS_STATS_H_
