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

#include "natbias/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "natbias/error.h"
#include "natbias/random.h"

namespace natbias::stats {
namespace {

struct SignedRanks {
  // Ranks are stored doubled so that average ranks of ties stay integral.
  std::vector<int64_t> doubled_ranks;
  int64_t doubled_w = 0;
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
};

SignedRanks RankNonZero(std::span<const double> diffs) {
  std::vector<double> nonzero;
  nonzero.reserve(diffs.size());
  for (const double d : diffs) {
    if (!std::isfinite(d)) throw ValidationError("non-finite difference");
    if (d != 0.0) nonzero.push_back(d);
  }
  std::sort(nonzero.begin(), nonzero.end(), [](double a, double b) {
    return std::fabs(a) < std::fabs(b);
  });
  SignedRanks out;
  const std::size_t n = nonzero.size();
  out.doubled_ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(nonzero[j + 1]) == std::fabs(nonzero[i])) {
      ++j;
    }
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const auto doubled = static_cast<int64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      out.doubled_ranks[k] = doubled;
      if (nonzero[k] > 0) out.doubled_w += doubled;
    }
    const auto t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  return out;
}

// Number of sign assignments for each achievable doubled statistic.
std::vector<double> NullCounts(const std::vector<int64_t>& doubled_ranks) {
  const int64_t total = std::accumulate(doubled_ranks.begin(),
                                        doubled_ranks.end(), int64_t{0});
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  int64_t reach = 0;
  for (const int64_t r : doubled_ranks) {
    for (int64_t s = reach; s >= 0; --s) {
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    }
    reach += r;
  }
  return counts;
}

double ExactTwoSided(const SignedRanks& ranks) {
  const std::vector<double> counts = NullCounts(ranks.doubled_ranks);
  const double total = std::ldexp(1.0, static_cast<int>(ranks.doubled_ranks.size()));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const auto value = static_cast<int64_t>(s);
    if (value <= ranks.doubled_w) lower += counts[s];
    if (value >= ranks.doubled_w) upper += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

double NormalTwoSided(const SignedRanks& ranks) {
  const auto n = static_cast<double>(ranks.doubled_ranks.size());
  const double w = static_cast<double>(ranks.doubled_w) / 2.0;
  const double mean = n * (n + 1.0) / 4.0;
  const double variance =
      n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ranks.tie_term / 48.0;
  if (variance <= 0.0) return 1.0;
  const double z = std::max(0.0, std::fabs(w - mean) - 0.5) / std::sqrt(variance);
  return std::min(1.0, 2.0 * NormalUpperTail(z));
}

// Continued fraction for the incomplete beta (modified Lentz).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace

WilcoxonResult WilcoxonSignedRank(std::span<const double> diffs,
                                  WilcoxonMethod method) {
  if (diffs.empty()) throw ValidationError("Wilcoxon test needs differences");
  const SignedRanks ranks = RankNonZero(diffs);
  WilcoxonResult result;
  result.n_effective = ranks.doubled_ranks.size();
  if (result.n_effective == 0) {
    result.degenerate = true;
    result.p_two_sided = 1.0;
    return result;
  }
  result.w_statistic = static_cast<double>(ranks.doubled_w) / 2.0;
  const bool exact =
      method == WilcoxonMethod::kExact ||
      (method == WilcoxonMethod::kAuto && result.n_effective <= kExactWilcoxonLimit);
  if (exact) {
    result.mode = WilcoxonMode::kExact;
    result.p_two_sided = ExactTwoSided(ranks);
  } else {
    result.mode = WilcoxonMode::kNormalApprox;
    result.p_two_sided = NormalTwoSided(ranks);
  }
  return result;
}

double NormalUpperTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw ValidationError("beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSided(double t, double dof) {
  if (dof <= 0.0) throw ValidationError("degrees of freedom must be > 0");
  if (std::isinf(t)) return 0.0;
  return RegularizedIncompleteBeta(dof / 2.0, 0.5, dof / (dof + t * t));
}

PearsonResult Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("Pearson inputs differ in length");
  }
  const std::size_t n = x.size();
  if (n < 3) throw ValidationError("Pearson correlation needs n >= 3");
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw ValidationError("Pearson correlation undefined for zero variance");
  }
  PearsonResult result;
  result.n = n;
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - result.r * result.r;
  if (one_minus_r2 <= 0.0) {
    result.p_two_sided = 0.0;
  } else {
    const double t = result.r * std::sqrt(dof / one_minus_r2);
    result.p_two_sided = StudentTTwoSided(t, dof);
  }
  return result;
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of empty sample");
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double QuantileSorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of empty sample");
  const double position = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = position - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapCI BootstrapMeanCI(std::span<const double> samples, std::size_t b,
                            double level, uint64_t seed) {
  if (samples.size() < 2) throw ValidationError("bootstrap needs n >= 2");
  if (b < 100) throw ValidationError("bootstrap needs b >= 100 resamples");
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence level must be in (0, 1)");
  }
  BootstrapCI ci;
  ci.level = level;
  ci.b = b;
  const bool constant =
      std::all_of(samples.begin(), samples.end(),
                  [&](double v) { return v == samples.front(); });
  if (constant) {
    ci.low = ci.high = samples.front();
    return ci;
  }
  const std::size_t n = samples.size();
  std::vector<double> means(b);
  for (std::size_t k = 0; k < b; ++k) {
    Rng rng(MixSeed(seed ^ MixSeed(static_cast<uint64_t>(k))));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += samples[static_cast<std::size_t>(rng.Below(n))];
    }
    means[k] = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  ci.low = QuantileSorted(means, tail);
  ci.high = QuantileSorted(means, 1.0 - tail);
  return ci;
}

}  // namespace natbias::stats
