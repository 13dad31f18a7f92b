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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.h"
#include "cli/config.h"
#include "natbias/error.h"

namespace {

using natbias::cli::AuditConfig;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::string> backend;
  std::optional<std::string> out;
  std::optional<std::string> source;
};

void AddCommon(CLI::App* cmd, Common& c, bool with_source) {
  cmd->add_option("--config", c.config, "TOML config file");
  cmd->add_option("--seed", c.seed, "Seed for every random choice");
  cmd->add_option("--alpha", c.alpha, "Significance level of the Wilcoxon test");
  cmd->add_option("--backend", c.backend, "Embedding backend: file, synthetic, external");
  cmd->add_option("--out", c.out, "Output directory");
  if (with_source) {
    cmd->add_option("--source", c.source, "Probe templates: native, eec, corpus-mined");
  }
}

natbias::cli::Overrides ToOverrides(const Common& c) {
  return {c.seed, c.alpha, c.backend, c.out, c.source};
}

AuditConfig Resolve(const Common& c) {
  AuditConfig config = c.config.empty() ? natbias::cli::DefaultConfig()
                                        : natbias::cli::LoadConfig(c.config);
  natbias::cli::ApplyOverrides(config, ToOverrides(c));
  return config;
}

int ExitCode(const natbias::Error& e) {
  switch (e.kind()) {
    case natbias::ErrorKind::kValidation:
      return 2;
    case natbias::ErrorKind::kMissingData:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nationality bias audit for frozen sentence embeddings"};
  app.require_subcommand(1);

  Common gen_opts, request_opts, audit_opts, stats_opts, corr_opts, rob_opts, rep_opts;

  CLI::App* gen = app.add_subcommand("gen", "Write training instances and probe groups");
  AddCommon(gen, gen_opts, true);

  CLI::App* request = app.add_subcommand(
      "extract-request", "Write the sentence list the embedding extractor needs");
  AddCommon(request, request_opts, true);

  CLI::App* audit = app.add_subcommand("audit", "Train, probe and classify bias");
  AddCommon(audit, audit_opts, true);

  CLI::App* stats = app.add_subcommand("corpus-stats",
                                       "Context positivity of nationality mentions");
  AddCommon(stats, stats_opts, false);
  natbias::cli::CorpusStatsOptions stats_extra;
  std::vector<std::string> corpus_files;
  std::string scores;
  std::string model;
  bool ignore_case = false;
  stats->add_option("--corpus", corpus_files, "Corpus files, plain or gzip");
  stats->add_option("--scores", scores, "Score store (JSONL) for masked sentences");
  stats->add_option("--model", model, "Score with a trained model.json instead");
  stats->add_flag("--emit-masked", stats_extra.emit_masked,
                  "Write masked sentences for an external scorer");
  stats->add_flag("--ignore-case", ignore_case, "Case-insensitive term matching");

  CLI::App* correlate = app.add_subcommand(
      "correlate", "Correlate context positivity with relative sentiment");
  AddCommon(correlate, corr_opts, false);
  std::string corpus_stats_path;
  std::string results_path;
  correlate->add_option("--corpus-stats", corpus_stats_path, "corpus_stats.csv")
      ->required();
  correlate->add_option("--results", results_path, "results.csv")->required();

  CLI::App* robustness = app.add_subcommand(
      "robustness", "Pairwise correlation of relative sentiment across setups");
  AddCommon(robustness, rob_opts, false);
  std::string plan_path;
  std::vector<std::string> named_results;
  robustness->add_option("--plan", plan_path, "Plan file with [[setup]] tables");
  robustness->add_option("results", named_results, "name=results.csv pairs");

  CLI::App* report = app.add_subcommand("report", "Table, plot data and SVG from results");
  AddCommon(report, rep_opts, false);
  std::string report_results;
  report->add_option("--results", report_results, "results.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      natbias::cli::CmdGen(Resolve(gen_opts), std::cout);
    } else if (request->parsed()) {
      natbias::cli::CmdExtractRequest(Resolve(request_opts), std::cout);
    } else if (audit->parsed()) {
      natbias::cli::CmdAudit(Resolve(audit_opts), std::cout);
    } else if (stats->parsed()) {
      for (const std::string& f : corpus_files) stats_extra.corpus.emplace_back(f);
      if (!scores.empty()) stats_extra.score_store = scores;
      if (!model.empty()) stats_extra.model = model;
      stats_extra.case_sensitive = !ignore_case;
      natbias::cli::CmdCorpusStats(Resolve(stats_opts), stats_extra, std::cout);
    } else if (correlate->parsed()) {
      const fs::path out = corr_opts.out ? fs::path(*corr_opts.out) : fs::path(".");
      natbias::cli::CmdCorrelate(corpus_stats_path, results_path, out, std::cout);
    } else if (robustness->parsed()) {
      if (plan_path.empty() == named_results.empty()) {
        throw natbias::ValidationError(
            "robustness takes either --plan or name=results.csv pairs");
      }
      if (!plan_path.empty()) {
        natbias::cli::RobustnessPlan plan = natbias::cli::LoadRobustnessPlan(plan_path);
        if (rob_opts.out) plan.output_dir = *rob_opts.out;
        for (auto& [name, config] : plan.setups) {
          natbias::cli::ApplyOverrides(config, ToOverrides(rob_opts));
        }
        natbias::cli::CmdRobustness(plan, std::cout);
      } else {
        std::vector<std::pair<std::string, fs::path>> pairs;
        for (const std::string& item : named_results) {
          const auto eq = item.find('=');
          if (eq == std::string::npos || eq == 0) {
            throw natbias::ValidationError("expected name=results.csv, got " + item);
          }
          pairs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
        const fs::path out = rob_opts.out ? fs::path(*rob_opts.out) : fs::path(".");
        natbias::cli::CmdRobustnessFromResults(pairs, out, std::cout);
      }
    } else if (report->parsed()) {
      const fs::path out = rep_opts.out ? fs::path(*rep_opts.out) : fs::path(".");
      natbias::cli::CmdReport(report_results, out, std::cout);
    }
  } catch (const natbias::Error& e) {
    std::cerr << "natbias: " << e.what() << "\n";
    return ExitCode(e);
  } catch (const std::exception& e) {
    std::cerr << "natbias: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
