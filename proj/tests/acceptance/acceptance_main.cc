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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "cli/commands.h"
#include "cli/config.h"
#include "natbias/bias_pipeline.h"
#include "natbias/classifier.h"
#include "natbias/corpus_positivity.h"
#include "natbias/lexica.h"
#include "natbias/random.h"
#include "natbias/stats.h"
#include "oracles.h"

namespace natbias {
namespace {

namespace fs = std::filesystem;
using cli::AuditConfig;
using Clock = std::chrono::steady_clock;

const fs::path kData = NATBIAS_TEST_DATA_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. Correlation over the 30 shipped context-positivity / sentiment pairs.
Verdict CorrelationFixture() {
  const auto start = Clock::now();
  const auto stats = cli::ReadCorpusStatsCsv(kData / "fixtures" / "reference_corpus_stats.csv");
  const auto results = cli::ReadResultsCsv(kData / "fixtures" / "reference_results.csv");
  const CorrelationReport report = Correlate(stats, results);
  const double elapsed = Seconds(start);
  const auto& p = report.pearson;
  const bool pass = p.n == 30 && std::abs(p.r - 0.59) <= 0.03 && p.p_two_sided < 0.05 &&
                    elapsed < 1.0;
  return {pass, fmt::format("n={} r={:.4f} p={:.3g} time={:.3f}s", p.n, p.r,
                            p.p_two_sided, elapsed)};
}

// 2. Exact Wilcoxon against full sign enumeration.
Verdict WilcoxonOracle() {
  Rng rng(20260101);
  double worst = 0.0;
  int cases = 0;
  for (std::size_t n = 5; n <= 12; ++n) {
    for (int i = 0; i < 100; ++i) {
      std::vector<double> diffs(n);
      // Half the draws come from a coarse grid so ties and zeros occur.
      const bool coarse = i % 2 == 0;
      for (double& d : diffs) {
        d = coarse ? static_cast<double>(static_cast<int>(rng.Below(7)) - 3)
                   : rng.Normal() + 0.3;
      }
      const double ours =
          stats::WilcoxonSignedRank(diffs, stats::WilcoxonMethod::kExact).p_two_sided;
      worst = std::max(worst, std::abs(ours - testing::EnumeratedWilcoxonP(diffs)));
      ++cases;
    }
  }
  const std::vector<double> five = {0.1, 0.2, 0.3, 0.4, 0.5};
  const double p5 = stats::WilcoxonSignedRank(five).p_two_sided;
  return {worst <= 1e-12 && p5 == 0.0625,
          fmt::format("cases={} max|dp|={:.3g} five-positive p={}", cases, worst, p5)};
}

AuditConfig SyntheticBiasConfig() {
  AuditConfig c = cli::LoadConfig(kData / "configs" / "synthetic_bias.toml");
  c.output_dir = fs::temp_directory_path() / "natbias_acceptance";
  return c;
}

// 3. Injected bias recovered across 100 seeds.
Verdict SyntheticRecovery() {
  const auto start = Clock::now();
  const AuditConfig base = SyntheticBiasConfig();
  const cli::Inputs inputs = cli::LoadInputs(base);
  const auto probes = cli::ProbeSet(inputs, base.backend.mask_token);
  std::size_t neutral_adjectives = 0;
  for (const LexiconEntry& e : inputs.lexicon) {
    neutral_adjectives += e.kind == LexiconKind::kNeutralAdjective;
  }

  constexpr int kSeeds = 100;
  std::vector<int> classes_ok(kSeeds, 0);
  std::vector<int> order_ok(kSeeds, 0);
  std::vector<std::string> errors(kSeeds);
  const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int s = static_cast<int>(w); s < kSeeds; s += static_cast<int>(workers)) {
        try {
          AuditConfig c = base;
          c.seed = static_cast<uint64_t>(s + 1);
          const cli::AuditOutcome out = cli::RunAudit(c);
          std::map<std::string, const NationalityResult*> by;
          for (const auto& r : out.results) by[r.nationality] = &r;
          const auto& x = *by.at("groupX");
          const auto& y = *by.at("groupY");
          const auto& z = *by.at("groupZ");
          classes_ok[s] = x.bias_class == BiasClass::kNegative &&
                          y.bias_class == BiasClass::kPositive &&
                          z.bias_class == BiasClass::kNeutral;
          order_ok[s] = x.relative_sentiment < z.relative_sentiment &&
                        z.relative_sentiment < y.relative_sentiment;
        } catch (const std::exception& e) {
          errors[s] = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  const double elapsed = Seconds(start);
  int n_classes = 0;
  int n_order = 0;
  std::string first_error;
  for (int s = 0; s < kSeeds; ++s) {
    n_classes += classes_ok[s];
    n_order += order_ok[s];
    if (first_error.empty() && !errors[s].empty()) first_error = errors[s];
  }
  const bool shape = inputs.probe_templates.size() == 10 && neutral_adjectives == 5 &&
                     probes.size() == 50;
  const bool pass = shape && first_error.empty() && n_classes >= 95 && n_order == kSeeds &&
                    elapsed < 30.0;
  return {pass, fmt::format("templates={} neutral_adj={} classes {}/100 ordering {}/100 "
                            "time={:.1f}s{}",
                            inputs.probe_templates.size(), neutral_adjectives, n_classes,
                            n_order, elapsed,
                            first_error.empty() ? "" : " error: " + first_error)};
}

// 4. Classifier sanity on the 5000 English training instances.
Verdict ClassifierSanity() {
  AuditConfig c = cli::DefaultConfig();
  const cli::Inputs inputs = cli::LoadInputs(c);
  const auto training = cli::TrainingSet(inputs);
  SyntheticParams params;
  params.seed = 17;
  params.axis_seed = 29;
  for (const LexiconEntry& e : inputs.lexicon) {
    if (e.polarity != 0) params.polarity_lexicon[e.surface] = e.polarity;
  }
  const SyntheticEncoder enc(64, "[MASK]", params);
  std::vector<LabeledEmbedding> data;
  for (const auto& t : training) data.push_back({enc.Encode(t.text), t.label});

  const TrainOptions options;
  const auto [model, report] = Train(data, ClassifierKind::kSvm, options, 5);
  const auto rerun = Train(data, ClassifierKind::kSvm, options, 5);
  const bool identical = ModelToJson(model) == ModelToJson(rerun.first) &&
                         report.objective == rerun.second.objective;

  // Finite-difference check of the MLP gradient on a slice of the data.
  const std::span<const LabeledEmbedding> slice(data.data(), 64);
  Rng rng(3);
  MlpWeights w;
  w.hidden = 6;
  for (std::size_t i = 0; i < w.hidden * 64; ++i) w.w1.push_back(0.2 * rng.Normal());
  for (std::size_t i = 0; i < w.hidden; ++i) w.b1.push_back(0.1 * rng.Normal());
  for (std::size_t i = 0; i < w.hidden; ++i) w.w2.push_back(0.5 * rng.Normal());
  w.b2 = 0.1;
  MlpWeights grad;
  detail::MlpObjective(w, slice, 1e-3, &grad);
  double worst = 0.0;
  const double h = 1e-5;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = detail::MlpObjective(w, slice, 1e-3, nullptr);
    param = saved - h;
    const double down = detail::MlpObjective(w, slice, 1e-3, nullptr);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic) / scale);
  };
  for (std::size_t i = 0; i < w.w1.size(); i += 7) probe(w.w1[i], grad.w1[i]);
  for (std::size_t i = 0; i < w.b1.size(); ++i) probe(w.b1[i], grad.b1[i]);
  for (std::size_t i = 0; i < w.w2.size(); ++i) probe(w.w2[i], grad.w2[i]);
  probe(w.b2, grad.b2);

  const bool pass = training.size() == 5000 && report.heldout_accuracy >= 0.99 &&
                    worst <= 1e-4 && identical;
  return {pass, fmt::format("n={} heldout_acc={:.4f} (n_heldout={}) mlp_grad_rel_err={:.2e} "
                            "rerun_identical={}",
                            training.size(), report.heldout_accuracy, report.n_heldout,
                            worst, identical)};
}

// 5. Generation counts for the English fixtures.
Verdict GenerationCounts() {
  AuditConfig c = cli::DefaultConfig();
  const cli::Inputs inputs = cli::LoadInputs(c);
  std::size_t nouns = 0;
  std::size_t polar = 0;
  std::size_t neutral = 0;
  for (const LexiconEntry& e : inputs.lexicon) {
    nouns += e.kind == LexiconKind::kNoun;
    polar += e.kind == LexiconKind::kPolarAdjective;
    neutral += e.kind == LexiconKind::kNeutralAdjective;
  }
  const auto training = cli::TrainingSet(inputs);
  const auto probes = cli::ProbeSet(inputs, "[MASK]");
  std::size_t texts = 0;
  for (const ProbeGroup& g : probes) texts += 1 + g.variants.size();
  const std::size_t t = inputs.probe_templates.size();
  const std::size_t n = inputs.nationalities.size();
  const std::size_t expected = t * neutral * (n + 1);
  const bool pass = inputs.training_templates.size() == 10 && nouns == 20 && polar == 25 &&
                    training.size() == 5000 && texts == expected;
  return {pass, fmt::format("training: {} templates x {} nouns x {} adjectives = {}; "
                            "probes: {} templates x {} adjectives x ({} + 1) = {} (got {})",
                            inputs.training_templates.size(), nouns, polar, training.size(),
                            t, neutral, n, expected, texts)};
}

// 6. SVM and MLP agree on relative sentiment for spread-out injected bias.
Verdict ClassifierRobustness() {
  AuditConfig base = SyntheticBiasConfig();
  base.nationalities.clear();
  base.backend.synthetic.bias_map.clear();
  for (int i = 0; i < 10; ++i) {
    const std::string name = "group" + std::to_string(i);
    base.nationalities.push_back(name);
    base.backend.synthetic.bias_map[name] = -0.6 + 0.12 * i + (i % 3 == 0 ? 0.03 : 0.0);
  }
  std::map<std::string, std::vector<NationalityResult>> sets;
  AuditConfig svm = base;
  svm.classifier = ClassifierKind::kSvm;
  AuditConfig mlp = base;
  mlp.classifier = ClassifierKind::kMlp;
  sets["mlp"] = cli::RunAudit(mlp).results;
  sets["svm"] = cli::RunAudit(svm).results;
  const auto cells = RobustnessMatrix(sets);
  const auto& cross = cells.at(1).pearson;
  return {cross.r >= 0.8 && cross.n == 10,
          fmt::format("groups={} r={:.4f} p={:.3g}", cross.n, cross.r, cross.p_two_sided)};
}

// 7. Two audits with the same config write identical CSV files.
Verdict Determinism() {
  std::ostringstream log;
  AuditConfig a = SyntheticBiasConfig();
  AuditConfig b = a;
  a.output_dir /= "determinism_a";
  b.output_dir /= "determinism_b";
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
  cli::CmdAudit(a, log);
  cli::CmdAudit(b, log);
  int compared = 0;
  bool same = true;
  for (const auto& entry : fs::directory_iterator(a.output_dir)) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    same = same && Slurp(entry.path()) == Slurp(b.output_dir / entry.path().filename());
  }
  return {same && compared >= 3, fmt::format("{} CSV files compared, identical={}",
                                             compared, same)};
}

}  // namespace
}  // namespace natbias

int main() {
  using natbias::Verdict;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 correlation fixture", natbias::CorrelationFixture},
      {"2 wilcoxon oracle", natbias::WilcoxonOracle},
      {"3 synthetic bias recovery", natbias::SyntheticRecovery},
      {"4 classifier sanity", natbias::ClassifierSanity},
      {"5 generation counts", natbias::GenerationCounts},
      {"6 svm/mlp robustness", natbias::ClassifierRobustness},
      {"7 audit determinism", natbias::Determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s  criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
