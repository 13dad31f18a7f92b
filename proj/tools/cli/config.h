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

// Audit configuration: a TOML file, optionally overridden from the command
// line. Relative paths resolve against the directory of the config file;
// paths starting with "@data/" resolve against the bundled data directory
// ($NATBIAS_DATA_DIR, or the one recorded at build time).

#ifndef NATBIAS_CLI_CONFIG_H_
#define NATBIAS_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "natbias/classifier.h"
#include "natbias/corpus_positivity.h"
#include "natbias/embedding.h"
#include "natbias/lexica.h"

namespace natbias::cli {

struct AuditConfig {
  std::string language = "en";
  BackendSpec backend;
  bool backend_seed_set = false;  // backend.seed given explicitly

  std::vector<std::filesystem::path> training_templates;
  std::vector<std::filesystem::path> probe_templates;
  std::vector<std::filesystem::path> lexicons;
  TemplateSource probe_source = TemplateSource::kNative;
  // Corpus files mined for templates when probe_source is corpus-mined.
  std::vector<std::filesystem::path> corpus;
  DocumentLayout corpus_layout = DocumentLayout::kLinePerDocument;

  // Explicit nationality list; empty means the lexicon's nationalities.
  std::vector<std::string> nationalities;

  ClassifierKind classifier = ClassifierKind::kSvm;
  TrainOptions train;

  double alpha = 0.05;
  std::size_t bootstrap_b = 1000;
  std::optional<uint64_t> seed;
  std::filesystem::path output_dir = "natbias_out";
};

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::string> backend;
  std::optional<std::string> output_dir;
  std::optional<std::string> source;
};

std::filesystem::path DataDir();

// Resolves "@data/..." and relative paths.
std::filesystem::path ResolvePath(std::string_view raw,
                                  const std::filesystem::path& base_dir);

AuditConfig ParseConfig(std::string_view toml_text,
                        const std::filesystem::path& base_dir);
AuditConfig LoadConfig(const std::filesystem::path& path);

// Config with every field at its default and the bundled fixtures selected.
AuditConfig DefaultConfig();

void ApplyOverrides(AuditConfig& config, const Overrides& overrides);

// Checks paths exist, the seed is present, and ranges are sane. Throws
// Error(kValidation). `check_backend` false skips the backend checks, for
// commands that only generate text.
void ValidateConfig(const AuditConfig& config, bool check_backend = true);

// Seed used by the synthetic backend: backend.seed if given, else the
// audit seed.
uint64_t BackendSeed(const AuditConfig& config);

struct RobustnessPlan {
  std::vector<std::pair<std::string, AuditConfig>> setups;
  std::filesystem::path output_dir = "natbias_robustness";
};

// A plan file names a base config and a list of [[setup]] tables; every key
// in a setup other than `name` is deep-merged over the base config.
RobustnessPlan LoadRobustnessPlan(const std::filesystem::path& path);

}  // namespace natbias::cli

#endif  // NATBIAS_CLI_CONFIG_H_
