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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "natbias/bias_pipeline.h"
#include "natbias/classifier.h"
#include "natbias/embedding.h"
#include "natbias/random.h"
#include "natbias/stats.h"

namespace natbias {
namespace {

std::vector<double> Normals(std::size_t n, uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.Normal() + shift;
  return v;
}

void BM_WilcoxonExact(benchmark::State& state) {
  const auto diffs = Normals(static_cast<std::size_t>(state.range(0)), 1, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stats::WilcoxonSignedRank(diffs, stats::WilcoxonMethod::kExact));
  }
}
BENCHMARK(BM_WilcoxonExact)->Arg(10)->Arg(25)->Arg(50)->Arg(150);

void BM_WilcoxonNormal(benchmark::State& state) {
  const auto diffs = Normals(static_cast<std::size_t>(state.range(0)), 1, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stats::WilcoxonSignedRank(diffs, stats::WilcoxonMethod::kNormalApprox));
  }
}
BENCHMARK(BM_WilcoxonNormal)->Arg(150)->Arg(4464);

void BM_Pearson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = Normals(n, 2);
  const auto y = Normals(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(stats::Pearson(x, y));
}
BENCHMARK(BM_Pearson)->Arg(30)->Arg(10000);

void BM_Bootstrap(benchmark::State& state) {
  const auto samples = Normals(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::BootstrapMeanCI(samples, 1000, 0.95, 9));
  }
}
BENCHMARK(BM_Bootstrap)->Arg(50)->Arg(500);

SyntheticParams Params() {
  SyntheticParams p;
  p.seed = 1;
  p.axis_seed = 2;
  p.bias_map = {{"groupX", -0.5}};
  p.polarity_lexicon = {{"happy", 1}, {"sad", -1}};
  return p;
}

void BM_SyntheticEncode(benchmark::State& state) {
  const SyntheticEncoder enc(static_cast<std::size_t>(state.range(0)), "[MASK]", Params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc.Encode("This groupX person is feeling happy today."));
  }
}
BENCHMARK(BM_SyntheticEncode)->Arg(64)->Arg(768);

std::vector<LabeledEmbedding> TrainingData(std::size_t n, std::size_t dim) {
  const SyntheticEncoder enc(dim, "[MASK]", Params());
  std::vector<LabeledEmbedding> data;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    const std::string text =
        "sentence " + std::to_string(i) + (pos ? " is happy" : " is sad");
    data.push_back({enc.Encode(text), pos ? 1 : -1});
  }
  return data;
}

void BM_TrainSvm(benchmark::State& state) {
  const auto data = TrainingData(static_cast<std::size_t>(state.range(0)), 64);
  const TrainOptions options;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Train(data, ClassifierKind::kSvm, options, 1));
  }
}
BENCHMARK(BM_TrainSvm)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_TrainMlp(benchmark::State& state) {
  const auto data = TrainingData(1000, 64);
  TrainOptions options;
  options.hidden_units = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Train(data, ClassifierKind::kMlp, options, 1));
  }
}
BENCHMARK(BM_TrainMlp)->Arg(16)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace natbias

BENCHMARK_MAIN();
