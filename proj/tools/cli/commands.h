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

// Subcommands of the natbias tool. Every command is a function of its
// config and input files; all randomness flows from the config seed.

#ifndef NATBIAS_CLI_COMMANDS_H_
#define NATBIAS_CLI_COMMANDS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cli/config.h"
#include "natbias/bias_pipeline.h"
#include "natbias/classifier.h"
#include "natbias/corpus_positivity.h"
#include "natbias/lexica.h"

namespace natbias::cli {

// Lexica and templates selected for one config.
struct Inputs {
  std::vector<LexiconEntry> lexicon;  // entries of config.language, deduplicated
  std::vector<Template> training_templates;
  std::vector<Template> probe_templates;
  std::vector<std::string> nationalities;
  std::vector<std::string> warnings;
};

Inputs LoadInputs(const AuditConfig& config);

std::vector<TrainingInstance> TrainingSet(const Inputs& inputs);
std::vector<ProbeGroup> ProbeSet(const Inputs& inputs, const std::string& mask_token);

// Every distinct text an audit will encode, in first-use order.
std::vector<std::string> AuditTexts(std::span<const TrainingInstance> training,
                                    std::span<const ProbeGroup> probes);

struct AuditOutcome {
  SentimentModel model;
  TrainReport train_report;
  std::size_t n_training = 0;
  std::size_t n_probe_groups = 0;
  std::size_t n_probe_texts = 0;
  std::vector<PairedDiff> diffs;
  std::vector<NationalityResult> results;
};

// Runs training and probing in memory. With a file backend, texts missing
// from the store are written to `missing_report` (when given) and a
// MissingDataError is thrown.
AuditOutcome RunAudit(const AuditConfig& config,
                      const std::filesystem::path& missing_report = {});

// ---------------------------------------------------------------------------
// Report files

std::string ResultsCsv(std::span<const NationalityResult> results);
std::vector<NationalityResult> ReadResultsCsv(const std::filesystem::path& path);
std::string ResultsJson(const AuditConfig& config, const AuditOutcome& outcome);
// Sorted by relative sentiment, with a color key: red negative, black neutral, green positive.
std::string PlotCsv(std::span<const NationalityResult> results);
std::string FigureSvg(std::span<const NationalityResult> results);
std::string ResultsTable(std::span<const NationalityResult> results);

std::string CorpusStatsCsv(std::span<const CorpusStats> stats);
std::vector<CorpusStats> ReadCorpusStatsCsv(const std::filesystem::path& path);

std::string RobustnessCsv(std::span<const RobustnessCell> cells);

void WriteFile(const std::filesystem::path& path, std::string_view content);

// ---------------------------------------------------------------------------
// Commands. Each writes into config.output_dir and logs to `log`.

void CmdGen(const AuditConfig& config, std::ostream& log);
void CmdExtractRequest(const AuditConfig& config, std::ostream& log);
AuditOutcome CmdAudit(const AuditConfig& config, std::ostream& log);

struct CorpusStatsOptions {
  std::vector<std::filesystem::path> corpus;  // falls back to config corpus
  std::optional<std::filesystem::path> score_store;
  std::optional<std::filesystem::path> model;  // classifier scorer
  bool emit_masked = false;  // write masked sentences for an external scorer
  bool case_sensitive = true;
};
std::vector<CorpusStats> CmdCorpusStats(const AuditConfig& config,
                                        const CorpusStatsOptions& options,
                                        std::ostream& log);

CorrelationReport CmdCorrelate(const std::filesystem::path& corpus_stats,
                               const std::filesystem::path& results,
                               const std::filesystem::path& output_dir,
                               std::ostream& log);

// Either runs every setup of a plan, or compares existing results files.
std::vector<RobustnessCell> CmdRobustness(const RobustnessPlan& plan,
                                          std::ostream& log);
std::vector<RobustnessCell> CmdRobustnessFromResults(
    const std::vector<std::pair<std::string, std::filesystem::path>>& results,
    const std::filesystem::path& output_dir, std::ostream& log);

void CmdReport(const std::filesystem::path& results,
               const std::filesystem::path& output_dir, std::ostream& log);

}  // namespace natbias::cli

#endif  // NATBIAS_CLI_COMMANDS_H_
