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

#include "cli/config.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "natbias/error.h"

#ifndef NATBIAS_DEFAULT_DATA_DIR
#define NATBIAS_DEFAULT_DATA_DIR "data"
#endif

namespace natbias::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kDataPrefix = "@data/";

void RejectUnknownKeys(const toml::table& table, std::string_view where,
                       const std::set<std::string_view>& known) {
  for (const auto& [key, value] : table) {
    if (known.count(key.str()) == 0) {
      throw ValidationError("unknown config key '" + std::string(key.str()) +
                            "' in " + std::string(where));
    }
  }
}

template <typename T>
std::optional<T> Get(const toml::table& table, std::string_view key) {
  const toml::node* node = table.get(key);
  if (node == nullptr) return std::nullopt;
  if constexpr (std::is_same_v<T, double>) {
    if (const auto v = node->value<double>()) return *v;
  } else {
    if (const auto v = node->value_exact<T>()) return *v;
  }
  throw ValidationError("config key '" + std::string(key) + "' has the wrong type");
}

std::vector<std::string> GetStrings(const toml::table& table, std::string_view key,
                                    bool* present = nullptr) {
  std::vector<std::string> out;
  const toml::node* node = table.get(key);
  if (present != nullptr) *present = node != nullptr;
  if (node == nullptr) return out;
  const toml::array* array = node->as_array();
  if (array == nullptr) {
    throw ValidationError("config key '" + std::string(key) + "' must be an array");
  }
  for (const toml::node& item : *array) {
    const auto s = item.value_exact<std::string>();
    if (!s) {
      throw ValidationError("config key '" + std::string(key) +
                            "' must hold strings");
    }
    out.push_back(*s);
  }
  return out;
}

std::vector<fs::path> GetPaths(const toml::table& table, std::string_view key,
                               const fs::path& base_dir,
                               std::vector<fs::path> fallback) {
  bool present = false;
  const std::vector<std::string> raw = GetStrings(table, key, &present);
  if (!present) return fallback;
  std::vector<fs::path> out;
  for (const std::string& r : raw) out.push_back(ResolvePath(r, base_dir));
  return out;
}

uint64_t ToSeed(int64_t value, std::string_view key) {
  if (value < 0) {
    throw ValidationError(std::string(key) + " must be non-negative");
  }
  return static_cast<uint64_t>(value);
}

const toml::table* SubTable(const toml::table& root, std::string_view key) {
  const toml::node* node = root.get(key);
  if (node == nullptr) return nullptr;
  if (!node->is_table()) {
    throw ValidationError("config key '" + std::string(key) + "' must be a table");
  }
  return node->as_table();
}

void MergeInto(toml::table& base, const toml::table& over) {
  for (const auto& [key, value] : over) {
    toml::node* existing = base.get(key.str());
    if (existing != nullptr && existing->is_table() && value.is_table()) {
      MergeInto(*existing->as_table(), *value.as_table());
      continue;
    }
    value.visit([&](const auto& concrete) {
      base.insert_or_assign(key.str(), concrete);
    });
  }
}

toml::table ParseToml(std::string_view text, std::string_view origin) {
  try {
    return toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream message;
    message << origin << ":" << e.source().begin.line << ": "
            << e.description();
    throw ValidationError(message.str());
  }
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

AuditConfig FromTable(const toml::table& root, const fs::path& base_dir) {
  RejectUnknownKeys(root, "top level",
                    {"language", "seed", "alpha", "bootstrap_b", "output_dir",
                     "nationalities", "templates", "lexicons", "backend",
                     "classifier"});
  AuditConfig config = DefaultConfig();
  if (auto v = Get<std::string>(root, "language")) config.language = *v;
  if (auto v = Get<int64_t>(root, "seed")) config.seed = ToSeed(*v, "seed");
  if (auto v = Get<double>(root, "alpha")) config.alpha = *v;
  if (auto v = Get<int64_t>(root, "bootstrap_b")) {
    if (*v < 0) throw ValidationError("bootstrap_b must be positive");
    config.bootstrap_b = static_cast<std::size_t>(*v);
  }
  if (auto v = Get<std::string>(root, "output_dir")) {
    config.output_dir = ResolvePath(*v, base_dir);
  }
  config.nationalities = GetStrings(root, "nationalities");

  if (const toml::table* t = SubTable(root, "templates")) {
    RejectUnknownKeys(*t, "[templates]",
                      {"training", "probes", "probe_source", "corpus",
                       "corpus_layout"});
    config.training_templates =
        GetPaths(*t, "training", base_dir, config.training_templates);
    config.probe_templates = GetPaths(*t, "probes", base_dir, config.probe_templates);
    config.corpus = GetPaths(*t, "corpus", base_dir, {});
    if (auto v = Get<std::string>(*t, "probe_source")) {
      config.probe_source = ParseTemplateSource(*v);
    }
    if (auto v = Get<std::string>(*t, "corpus_layout")) {
      if (*v == "line") {
        config.corpus_layout = DocumentLayout::kLinePerDocument;
      } else if (*v == "blank-line") {
        config.corpus_layout = DocumentLayout::kBlankLineSeparated;
      } else {
        throw ValidationError("corpus_layout must be 'line' or 'blank-line'");
      }
    }
  }

  if (const toml::table* t = SubTable(root, "lexicons")) {
    RejectUnknownKeys(*t, "[lexicons]", {"paths"});
    config.lexicons = GetPaths(*t, "paths", base_dir, config.lexicons);
  }

  if (const toml::table* t = SubTable(root, "backend")) {
    RejectUnknownKeys(*t, "[backend]",
                      {"kind", "dimension", "mask_token", "path", "command",
                       "seed", "axis_seed", "polarity_axis", "bias_map"});
    BackendSpec& b = config.backend;
    if (auto v = Get<std::string>(*t, "kind")) b.kind = ParseBackendKind(*v);
    if (auto v = Get<int64_t>(*t, "dimension")) {
      if (*v < 0) throw ValidationError("backend.dimension must be positive");
      b.dimension = static_cast<std::size_t>(*v);
    }
    if (auto v = Get<std::string>(*t, "mask_token")) b.mask_token = *v;
    if (auto v = Get<std::string>(*t, "path")) b.path = ResolvePath(*v, base_dir);
    b.command = GetStrings(*t, "command");
    if (auto v = Get<int64_t>(*t, "seed")) {
      b.synthetic.seed = ToSeed(*v, "backend.seed");
      config.backend_seed_set = true;
    }
    if (auto v = Get<int64_t>(*t, "axis_seed")) {
      b.synthetic.axis_seed = ToSeed(*v, "backend.axis_seed");
    }
    if (const toml::node* axis = t->get("polarity_axis")) {
      const toml::array* array = axis->as_array();
      if (array == nullptr) throw ValidationError("polarity_axis must be an array");
      for (const toml::node& item : *array) {
        const auto x = item.value<double>();
        if (!x) throw ValidationError("polarity_axis must hold numbers");
        b.synthetic.polarity_axis.push_back(*x);
      }
    }
    if (const toml::table* bias = SubTable(*t, "bias_map")) {
      for (const auto& [group, value] : *bias) {
        const auto x = value.value<double>();
        if (!x) throw ValidationError("bias_map values must be numbers");
        b.synthetic.bias_map[std::string(group.str())] = *x;
      }
    }
  }

  if (const toml::table* t = SubTable(root, "classifier")) {
    RejectUnknownKeys(*t, "[classifier]",
                      {"kind", "l2", "epochs", "learning_rate", "hidden_units",
                       "mlp_epochs", "mlp_learning_rate", "mlp_l2",
                       "heldout_fraction"});
    if (auto v = Get<std::string>(*t, "kind")) {
      config.classifier = ParseClassifierKind(*v);
    }
    TrainOptions& o = config.train;
    if (auto v = Get<double>(*t, "l2")) o.l2 = *v;
    if (auto v = Get<int64_t>(*t, "epochs")) o.epochs = static_cast<int>(*v);
    if (auto v = Get<double>(*t, "learning_rate")) o.learning_rate = *v;
    if (auto v = Get<int64_t>(*t, "hidden_units")) {
      if (*v <= 0) throw ValidationError("hidden_units must be positive");
      o.hidden_units = static_cast<std::size_t>(*v);
    }
    if (auto v = Get<int64_t>(*t, "mlp_epochs")) o.mlp_epochs = static_cast<int>(*v);
    if (auto v = Get<double>(*t, "mlp_learning_rate")) o.mlp_learning_rate = *v;
    if (auto v = Get<double>(*t, "mlp_l2")) o.mlp_l2 = *v;
    if (auto v = Get<double>(*t, "heldout_fraction")) o.heldout_fraction = *v;
  }
  return config;
}

}  // namespace

fs::path DataDir() {
  if (const char* env = std::getenv("NATBIAS_DATA_DIR"); env != nullptr && *env) {
    return fs::path(env);
  }
  return fs::path(NATBIAS_DEFAULT_DATA_DIR);
}

fs::path ResolvePath(std::string_view raw, const fs::path& base_dir) {
  if (raw.substr(0, kDataPrefix.size()) == kDataPrefix) {
    return DataDir() / fs::path(raw.substr(kDataPrefix.size()));
  }
  const fs::path p(raw);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

AuditConfig DefaultConfig() {
  AuditConfig config;
  const fs::path data = DataDir();
  config.training_templates = {data / "templates/multilingual_training.json",
                               data / "templates/en_training_extra.json"};
  config.probe_templates = {data / "templates/multilingual_probes.json",
                            data / "templates/en_probes_extra.json",
                            data / "templates/eec_probes.json"};
  config.lexicons = {data / "lexica/multilingual.json", data / "lexica/en_extra.json",
                     data / "lexica/eec_words.json"};
  return config;
}

AuditConfig ParseConfig(std::string_view toml_text, const fs::path& base_dir) {
  return FromTable(ParseToml(toml_text, "<config>"), base_dir);
}

AuditConfig LoadConfig(const fs::path& path) {
  const toml::table root = ParseToml(ReadFile(path), path.string());
  try {
    return FromTable(root, path.parent_path());
  } catch (const Error& e) {
    throw e.WithContext(path.string());
  }
}

void ApplyOverrides(AuditConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.alpha) config.alpha = *overrides.alpha;
  if (overrides.backend) config.backend.kind = ParseBackendKind(*overrides.backend);
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.source) config.probe_source = ParseTemplateSource(*overrides.source);
}

uint64_t BackendSeed(const AuditConfig& config) {
  if (config.backend_seed_set) return config.backend.synthetic.seed;
  return config.seed.value_or(0);
}

void ValidateConfig(const AuditConfig& config, bool check_backend) {
  if (!config.seed) {
    throw ValidationError("a seed is required (config 'seed' or --seed)");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ValidationError("alpha must be in (0, 1)");
  }
  if (config.bootstrap_b < 100) {
    throw ValidationError("bootstrap_b must be at least 100");
  }
  if (config.language.empty()) throw ValidationError("language is empty");
  auto require = [](const std::vector<fs::path>& paths, std::string_view what) {
    for (const fs::path& p : paths) {
      if (!fs::exists(p)) {
        throw ValidationError(std::string(what) + " not found: " + p.string());
      }
    }
  };
  require(config.training_templates, "training template file");
  require(config.probe_templates, "probe template file");
  require(config.lexicons, "lexicon file");
  require(config.corpus, "corpus file");
  if (config.probe_source == TemplateSource::kCorpusMined && config.corpus.empty()) {
    throw ValidationError("probe_source 'corpus-mined' needs templates.corpus");
  }
  if (config.backend.mask_token.empty()) throw ValidationError("empty mask token");
  if (!check_backend) return;
  if (config.backend.kind == BackendKind::kFile && !fs::exists(config.backend.path)) {
    throw ValidationError("embeddings store not found: " +
                          config.backend.path.string());
  }
  if (config.backend.kind == BackendKind::kSynthetic && config.backend.dimension < 2) {
    throw ValidationError("synthetic backend needs backend.dimension >= 2");
  }
  if (config.backend.kind == BackendKind::kExternal && config.backend.command.empty()) {
    throw ValidationError("external backend needs backend.command");
  }
}

RobustnessPlan LoadRobustnessPlan(const fs::path& path) {
  const toml::table plan = ParseToml(ReadFile(path), path.string());
  RejectUnknownKeys(plan, path.string(), {"base", "output_dir", "setup"});
  const fs::path plan_dir = path.parent_path();
  RobustnessPlan out;
  if (auto v = Get<std::string>(plan, "output_dir")) {
    out.output_dir = ResolvePath(*v, plan_dir);
  }
  toml::table base;
  fs::path base_dir = plan_dir;
  if (auto v = Get<std::string>(plan, "base")) {
    const fs::path base_path = ResolvePath(*v, plan_dir);
    base = ParseToml(ReadFile(base_path), base_path.string());
    base_dir = base_path.parent_path();
  }
  const toml::array* setups = plan.get_as<toml::array>("setup");
  if (setups == nullptr || setups->empty()) {
    throw ValidationError(path.string() + ": no [[setup]] entries");
  }
  std::set<std::string> names;
  for (const toml::node& node : *setups) {
    const toml::table* setup = node.as_table();
    if (setup == nullptr) throw ValidationError("[[setup]] must be tables");
    const auto name = Get<std::string>(*setup, "name");
    if (!name || name->empty()) throw ValidationError("[[setup]] needs a name");
    if (!names.insert(*name).second) {
      throw ValidationError("duplicate setup name " + *name);
    }
    toml::table merged = base;
    toml::table overrides = *setup;
    overrides.erase("name");
    MergeInto(merged, overrides);
    try {
      out.setups.emplace_back(*name, FromTable(merged, base_dir));
    } catch (const Error& e) {
      throw e.WithContext("setup " + *name);
    }
  }
  return out;
}

}  // namespace natbias::cli
