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

#include "cli/commands.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/csv.h"
#include "natbias/embedding.h"
#include "natbias/error.h"
#include "natbias/random.h"
#include "natbias/text.h"

namespace natbias::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::vector<LexiconEntry> LoadLanguageLexicon(const AuditConfig& config,
                                              std::vector<std::string>* warnings) {
  std::vector<LexiconEntry> out;
  std::set<std::pair<LexiconKind, std::string>> seen;
  for (const fs::path& path : config.lexicons) {
    LexiconLoad load = LoadLexicon(path);
    if (warnings != nullptr) {
      warnings->insert(warnings->end(), load.warnings.begin(), load.warnings.end());
    }
    for (LexiconEntry& e : load.entries) {
      if (e.language != config.language) continue;
      if (!seen.emplace(e.kind, e.surface).second) continue;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<std::string> SelectNationalities(const AuditConfig& config,
                                             std::span<const LexiconEntry> lexicon) {
  std::vector<std::string> out = config.nationalities;
  if (out.empty()) {
    for (const LexiconEntry& e :
         SelectEntries(lexicon, LexiconKind::kNationality, config.language)) {
      out.push_back(e.surface);
    }
  }
  std::set<std::string> distinct(out.begin(), out.end());
  if (distinct.size() != out.size()) {
    throw ValidationError("nationality list has duplicates");
  }
  if (out.empty()) {
    throw ValidationError("empty nationality list for language " + config.language);
  }
  return out;
}

std::vector<Template> LoadAllTemplates(std::span<const fs::path> paths) {
  std::vector<Template> out;
  std::set<std::string> ids;
  for (const fs::path& path : paths) {
    for (Template& t : LoadTemplates(path)) {
      if (!ids.insert(t.id).second) {
        throw ValidationError(path.string() + ": template id " + t.id +
                              " already defined");
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::string JsonLine(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::strict) + "\n";
}

std::string Num(double x) { return fmt::format("{}", x); }

std::string_view ColorOf(BiasClass c) {
  switch (c) {
    case BiasClass::kNegative:
      return "red";
    case BiasClass::kNeutral:
      return "black";
    case BiasClass::kPositive:
      return "green";
  }
  return "black";
}

std::string XmlEscape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::vector<NationalityResult> SortedForPlot(std::span<const NationalityResult> results) {
  std::vector<NationalityResult> sorted(results.begin(), results.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const NationalityResult& a, const NationalityResult& b) {
                     return a.relative_sentiment < b.relative_sentiment;
                   });
  return sorted;
}

double ParseNumber(const std::string& field, std::string_view column) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size() || !std::isfinite(value)) {
    throw ValidationError("column " + std::string(column) + ": bad number '" +
                          field + "'");
  }
  return value;
}

std::size_t ParseCount(const std::string& field, std::string_view column) {
  const double value = ParseNumber(field, column);
  if (value < 0 || value != std::floor(value)) {
    throw ValidationError("column " + std::string(column) + ": bad count '" +
                          field + "'");
  }
  return static_cast<std::size_t>(value);
}

std::unique_ptr<Encoder> BuildEncoder(const AuditConfig& config,
                                      std::span<const LexiconEntry> lexicon) {
  BackendSpec spec = config.backend;
  if (spec.kind == BackendKind::kSynthetic) {
    spec.synthetic.seed = BackendSeed(config);
    if (spec.synthetic.polarity_lexicon.empty()) {
      for (const LexiconEntry& e : lexicon) {
        if (e.polarity != 0) spec.synthetic.polarity_lexicon[e.surface] = e.polarity;
      }
    }
  }
  return MakeEncoder(spec);
}

void CheckSetupName(const std::string& name) {
  const bool ok = !name.empty() && name != "." && name != ".." &&
                  std::all_of(name.begin(), name.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                           c == '_' || c == '.';
                  });
  if (!ok) throw ValidationError("setup name '" + name + "' is not a plain file name");
}

}  // namespace

Inputs LoadInputs(const AuditConfig& config) {
  Inputs inputs;
  inputs.lexicon = LoadLanguageLexicon(config, &inputs.warnings);
  inputs.nationalities = SelectNationalities(config, inputs.lexicon);

  for (Template& t : LoadAllTemplates(config.training_templates)) {
    if (t.language == config.language && t.source == TemplateSource::kNative &&
        t.HasSlot(Slot::kNoun)) {
      inputs.training_templates.push_back(std::move(t));
    }
  }

  if (config.probe_source == TemplateSource::kCorpusMined) {
    const ExtractedSentences extracted = ExtractSentencesFromFiles(
        config.corpus, inputs.nationalities, {.layout = config.corpus_layout});
    std::vector<std::string> sentences;
    std::set<std::string> seen;
    for (const auto& [term, list] : extracted.by_term) {
      for (const std::string& s : list) {
        if (seen.insert(s).second) sentences.push_back(s);
      }
    }
    MinedTemplates mined = MineCorpusTemplates(sentences, inputs.nationalities,
                                               {.language = config.language});
    if (!mined.multi_match.empty()) {
      inputs.warnings.push_back(fmt::format(
          "{} mined sentences mention more than one nationality; only the first "
          "mention was slotted",
          mined.multi_match.size()));
    }
    if (extracted.skipped_chunks != 0) {
      inputs.warnings.push_back(fmt::format("{} corpus documents were not valid UTF-8",
                                            extracted.skipped_chunks));
    }
    inputs.probe_templates = std::move(mined.templates);
  } else {
    for (Template& t : LoadAllTemplates(config.probe_templates)) {
      if (t.language == config.language && t.source == config.probe_source &&
          t.HasSlot(Slot::kNationality)) {
        inputs.probe_templates.push_back(std::move(t));
      }
    }
  }
  std::sort(inputs.training_templates.begin(), inputs.training_templates.end(),
            [](const Template& a, const Template& b) { return a.id < b.id; });
  std::sort(inputs.probe_templates.begin(), inputs.probe_templates.end(),
            [](const Template& a, const Template& b) { return a.id < b.id; });
  if (inputs.training_templates.empty()) {
    throw ValidationError("no training templates for language " + config.language);
  }
  if (inputs.probe_templates.empty()) {
    throw ValidationError(fmt::format("no {} probe templates for language {}",
                                      ToString(config.probe_source),
                                      config.language));
  }
  return inputs;
}

std::vector<TrainingInstance> TrainingSet(const Inputs& inputs) {
  const std::vector<LexiconEntry> nouns =
      SelectEntries(inputs.lexicon, LexiconKind::kNoun);
  const std::vector<LexiconEntry> adjectives =
      SelectEntries(inputs.lexicon, LexiconKind::kPolarAdjective);
  return GenerateTraining(inputs.training_templates, nouns, adjectives);
}

std::vector<ProbeGroup> ProbeSet(const Inputs& inputs, const std::string& mask_token) {
  return GenerateProbes(inputs.probe_templates, inputs.lexicon, inputs.nationalities,
                        mask_token);
}

std::vector<std::string> AuditTexts(std::span<const TrainingInstance> training,
                                    std::span<const ProbeGroup> probes) {
  std::vector<std::string> texts;
  std::set<std::string> seen;
  auto add = [&](const std::string& t) {
    if (seen.insert(t).second) texts.push_back(t);
  };
  for (const TrainingInstance& t : training) add(t.text);
  for (const ProbeGroup& g : probes) {
    add(g.baseline_text);
    for (const ProbeVariant& v : g.variants) add(v.text);
  }
  return texts;
}

AuditOutcome RunAudit(const AuditConfig& config, const fs::path& missing_report) {
  ValidateConfig(config);
  const Inputs inputs = LoadInputs(config);
  const std::vector<TrainingInstance> training = TrainingSet(inputs);
  const std::vector<ProbeGroup> probes = ProbeSet(inputs, config.backend.mask_token);
  const std::unique_ptr<Encoder> encoder = BuildEncoder(config, inputs.lexicon);

  if (const auto* file = dynamic_cast<const FileEncoder*>(encoder.get())) {
    const std::vector<std::string> missing = file->Missing(AuditTexts(training, probes));
    if (!missing.empty()) {
      std::string note;
      if (!missing_report.empty()) {
        std::string listing;
        for (const std::string& t : missing) listing += t + "\n";
        WriteFile(missing_report, listing);
        note = "; listed in " + missing_report.string();
      }
      throw MissingDataError(fmt::format(
          "{} texts have no stored embedding{} (first: \"{}\")", missing.size(), note,
          missing.front()));
    }
  }

  std::vector<std::string> texts;
  texts.reserve(training.size());
  for (const TrainingInstance& t : training) texts.push_back(t.text);
  std::vector<EmbeddingVector> vectors = encoder->EncodeBatch(texts);
  std::vector<LabeledEmbedding> data;
  data.reserve(training.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    data.push_back({std::move(vectors[i]), training[i].label});
  }

  const uint64_t seed = *config.seed;
  AuditOutcome outcome;
  auto [model, report] = Train(data, config.classifier, config.train, seed);
  model.metadata["language"] = config.language;
  model.metadata["backend"] = std::string(ToString(config.backend.kind));
  model.metadata["mask_token"] = config.backend.mask_token;
  outcome.model = std::move(model);
  outcome.train_report = std::move(report);
  outcome.n_training = training.size();
  outcome.n_probe_groups = probes.size();
  for (const ProbeGroup& g : probes) outcome.n_probe_texts += 1 + g.variants.size();

  outcome.diffs = PairedScores(outcome.model, probes, *encoder);
  const ClassifyOptions options{
      .alpha = config.alpha,
      .bootstrap_b = config.bootstrap_b,
      .ci_level = 0.95,
      .seed = DeriveSeed(seed, "bootstrap"),
  };
  outcome.results = AggregateByNationality(outcome.diffs, options);
  return outcome;
}

// ---------------------------------------------------------------------------

void WriteFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string ResultsCsv(std::span<const NationalityResult> results) {
  std::string out =
      "nationality,relative_sentiment,ci_low,ci_high,p_value,bias_class,n_pairs\n";
  for (const NationalityResult& r : results) {
    out += CsvRow({r.nationality, Num(r.relative_sentiment), Num(r.ci.low),
                   Num(r.ci.high), Num(r.wilcoxon.p_two_sided),
                   std::string(ToString(r.bias_class)), std::to_string(r.n_pairs)});
  }
  return out;
}

std::vector<NationalityResult> ReadResultsCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const std::size_t name = table.Column("nationality");
  const std::size_t rs = table.Column("relative_sentiment");
  const auto low = table.FindColumn("ci_low");
  const auto high = table.FindColumn("ci_high");
  const auto p = table.FindColumn("p_value");
  const auto cls = table.FindColumn("bias_class");
  const auto n = table.FindColumn("n_pairs");
  std::vector<NationalityResult> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::vector<std::string>& row = table.rows[i];
    try {
      NationalityResult r;
      r.nationality = row[name];
      r.relative_sentiment = ParseNumber(row[rs], "relative_sentiment");
      r.ci.low = r.ci.high = r.relative_sentiment;
      if (low && !row[*low].empty()) r.ci.low = ParseNumber(row[*low], "ci_low");
      if (high && !row[*high].empty()) r.ci.high = ParseNumber(row[*high], "ci_high");
      if (p && !row[*p].empty()) r.wilcoxon.p_two_sided = ParseNumber(row[*p], "p_value");
      if (cls && !row[*cls].empty()) r.bias_class = ParseBiasClass(row[*cls]);
      if (n && !row[*n].empty()) r.n_pairs = ParseCount(row[*n], "n_pairs");
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw e.WithContext(fmt::format("{}:{}", path.string(), table.row_lines[i]));
    }
  }
  return out;
}

std::string ResultsJson(const AuditConfig& config, const AuditOutcome& outcome) {
  json meta = {
      {"language", config.language},
      {"backend", ToString(config.backend.kind)},
      {"dimension", outcome.model.dimension},
      {"mask_token", config.backend.mask_token},
      {"classifier", ToString(config.classifier)},
      {"probe_source", ToString(config.probe_source)},
      {"alpha", config.alpha},
      {"bootstrap_b", config.bootstrap_b},
      {"ci_level", 0.95},
      {"seed", config.seed.value_or(0)},
  };
  json training = {
      {"n_instances", outcome.n_training},
      {"n_train", outcome.train_report.n_train},
      {"n_heldout", outcome.train_report.n_heldout},
      {"heldout_accuracy", outcome.train_report.heldout_accuracy},
      {"epochs", outcome.train_report.epochs},
      {"calibration",
       {{"a", outcome.model.calibration.a}, {"b", outcome.model.calibration.b}}},
  };
  json results = json::array();
  for (const NationalityResult& r : outcome.results) {
    results.push_back({
        {"nationality", r.nationality},
        {"relative_sentiment", r.relative_sentiment},
        {"ci", {{"low", r.ci.low}, {"high", r.ci.high}, {"level", r.ci.level},
                {"b", r.ci.b}}},
        {"wilcoxon",
         {{"w_statistic", r.wilcoxon.w_statistic},
          {"n_effective", r.wilcoxon.n_effective},
          {"p_two_sided", r.wilcoxon.p_two_sided},
          {"mode", r.wilcoxon.mode == stats::WilcoxonMode::kExact ? "exact"
                                                                  : "normal-approx"},
          {"degenerate", r.wilcoxon.degenerate}}},
        {"bias_class", ToString(r.bias_class)},
        {"n_pairs", r.n_pairs},
        {"underpowered", r.underpowered},
    });
  }
  json doc = {
      {"config", meta},
      {"training", training},
      {"probes",
       {{"n_groups", outcome.n_probe_groups}, {"n_texts", outcome.n_probe_texts}}},
      {"results", results},
  };
  return doc.dump(2) + "\n";
}

std::string PlotCsv(std::span<const NationalityResult> results) {
  std::string out = "nationality,relative_sentiment,ci_low,ci_high,bias_class,color\n";
  for (const NationalityResult& r : SortedForPlot(results)) {
    out += CsvRow({r.nationality, Num(r.relative_sentiment), Num(r.ci.low),
                   Num(r.ci.high), std::string(ToString(r.bias_class)),
                   std::string(ColorOf(r.bias_class))});
  }
  return out;
}

std::string FigureSvg(std::span<const NationalityResult> results) {
  const std::vector<NationalityResult> rows = SortedForPlot(results);
  double extent = 0.05;
  for (const NationalityResult& r : rows) {
    extent = std::max({extent, std::abs(r.ci.low), std::abs(r.ci.high),
                       std::abs(r.relative_sentiment)});
  }
  extent = std::min(1.0, std::ceil(extent * 10.0) / 10.0);

  constexpr double kLabelWidth = 140.0;
  constexpr double kPlotWidth = 420.0;
  constexpr double kRow = 18.0;
  constexpr double kTop = 20.0;
  const double height = kTop + kRow * static_cast<double>(rows.size()) + 30.0;
  const double width = kLabelWidth + kPlotWidth + 20.0;
  auto x_of = [&](double v) {
    return kLabelWidth + (v + extent) / (2.0 * extent) * kPlotWidth;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" "
      "height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\">\n"
      "<style>text{{font-family:sans-serif;font-size:11px}}</style>\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  const double axis_y = kTop + kRow * static_cast<double>(rows.size()) + 4.0;
  svg += fmt::format(
      "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" "
      "stroke=\"#999\" stroke-dasharray=\"3,3\"/>\n",
      x_of(0.0), kTop - 6.0, axis_y);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const NationalityResult& r = rows[i];
    const double y = kTop + kRow * static_cast<double>(i) + kRow / 2.0;
    const std::string_view color = ColorOf(r.bias_class);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n",
        kLabelWidth - 8.0, y + 4.0, XmlEscape(r.nationality));
    svg += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
        "stroke=\"{}\"/>\n",
        x_of(r.ci.low), y, x_of(r.ci.high), y, color);
    svg += fmt::format(
        "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3.5\" fill=\"{}\"/>\n",
        x_of(r.relative_sentiment), y, color);
  }
  svg += fmt::format(
      "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
      "stroke=\"black\"/>\n",
      x_of(-extent), axis_y, x_of(extent), axis_y);
  for (const double tick : {-extent, -extent / 2.0, 0.0, extent / 2.0, extent}) {
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.2f}</text>\n",
        x_of(tick), axis_y + 14.0, tick == 0.0 ? 0.0 : tick);
  }
  svg += "</svg>\n";
  return svg;
}

std::string ResultsTable(std::span<const NationalityResult> results) {
  std::size_t name_width = 11;
  for (const NationalityResult& r : results) {
    name_width = std::max(name_width, r.nationality.size());
  }
  std::string out = fmt::format("{:<{}}  {:>8}  {:>17}  {:>9}  {:<8}  {:>7}\n",
                                "nationality", name_width, "rel.sent", "95% CI",
                                "p", "class", "n_pairs");
  for (const NationalityResult& r : results) {
    out += fmt::format(
        "{:<{}}  {:>8.3f}  [{:>7.3f}, {:>6.3f}]  {:>9.3g}  {:<8}  {:>7}{}\n",
        r.nationality, name_width, r.relative_sentiment, r.ci.low, r.ci.high,
        r.wilcoxon.p_two_sided, ToString(r.bias_class), r.n_pairs,
        r.underpowered ? "  (underpowered)" : "");
  }
  return out;
}

std::string CorpusStatsCsv(std::span<const CorpusStats> stats) {
  std::string out = "nationality,context_positivity,n_sentences\n";
  for (const CorpusStats& s : stats) {
    out += CsvRow({s.nationality,
                   s.context_positivity ? Num(*s.context_positivity) : std::string(),
                   std::to_string(s.n_sentences)});
  }
  return out;
}

std::vector<CorpusStats> ReadCorpusStatsCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const std::size_t name = table.Column("nationality");
  const std::size_t positivity = table.Column("context_positivity");
  const auto n = table.FindColumn("n_sentences");
  std::vector<CorpusStats> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::vector<std::string>& row = table.rows[i];
    try {
      CorpusStats s;
      s.nationality = row[name];
      if (!row[positivity].empty()) {
        const double v = ParseNumber(row[positivity], "context_positivity");
        if (v < 0.0 || v > 1.0) {
          throw ValidationError("context_positivity outside [0, 1]");
        }
        s.context_positivity = v;
      }
      if (n && !row[*n].empty()) s.n_sentences = ParseCount(row[*n], "n_sentences");
      out.push_back(std::move(s));
    } catch (const Error& e) {
      throw e.WithContext(fmt::format("{}:{}", path.string(), table.row_lines[i]));
    }
  }
  return out;
}

std::string RobustnessCsv(std::span<const RobustnessCell> cells) {
  std::string out = "setup_a,setup_b,r,p_value,n\n";
  for (const RobustnessCell& c : cells) {
    out += CsvRow({c.setup_a, c.setup_b, Num(c.pearson.r), Num(c.pearson.p_two_sided),
                   std::to_string(c.pearson.n)});
  }
  return out;
}

// ---------------------------------------------------------------------------

void CmdGen(const AuditConfig& config, std::ostream& log) {
  ValidateConfig(config, /*check_backend=*/false);
  const Inputs inputs = LoadInputs(config);
  for (const std::string& w : inputs.warnings) log << "warning: " << w << "\n";
  const std::vector<TrainingInstance> training = TrainingSet(inputs);
  const std::vector<ProbeGroup> probes = ProbeSet(inputs, config.backend.mask_token);

  std::string training_out;
  for (const TrainingInstance& t : training) {
    training_out += JsonLine({{"text", t.text},
                              {"label", t.label},
                              {"template_id", t.template_id},
                              {"adjective", t.adjective}});
  }
  std::string probes_out;
  std::size_t n_texts = 0;
  for (const ProbeGroup& g : probes) {
    json variants = json::array();
    for (const ProbeVariant& v : g.variants) {
      variants.push_back({{"nationality", v.nationality}, {"text", v.text}});
    }
    n_texts += 1 + g.variants.size();
    probes_out += JsonLine({{"template_id", g.template_id},
                            {"adjective", g.adjective},
                            {"adjective_polarity", g.adjective_polarity},
                            {"baseline_text", g.baseline_text},
                            {"variants", variants}});
  }
  WriteFile(config.output_dir / "training.jsonl", training_out);
  WriteFile(config.output_dir / "probes.jsonl", probes_out);
  log << fmt::format(
      "{} training instances from {} templates; {} probe groups ({} texts) from "
      "{} {} templates and {} nationalities\n",
      training.size(), inputs.training_templates.size(), probes.size(), n_texts,
      inputs.probe_templates.size(), ToString(config.probe_source),
      inputs.nationalities.size());
  log << "wrote " << (config.output_dir / "training.jsonl").string() << " and "
      << (config.output_dir / "probes.jsonl").string() << "\n";
}

void CmdExtractRequest(const AuditConfig& config, std::ostream& log) {
  ValidateConfig(config, /*check_backend=*/false);
  const Inputs inputs = LoadInputs(config);
  for (const std::string& w : inputs.warnings) log << "warning: " << w << "\n";
  const std::vector<TrainingInstance> training = TrainingSet(inputs);
  const std::vector<ProbeGroup> probes = ProbeSet(inputs, config.backend.mask_token);
  std::string listing;
  std::size_t n = 0;
  for (const std::string& t : AuditTexts(training, probes)) {
    listing += t + "\n";
    ++n;
  }
  const fs::path path = config.output_dir / "sentences.txt";
  WriteFile(path, listing);
  log << fmt::format("wrote {} distinct sentences to {}\n", n, path.string());
}

AuditOutcome CmdAudit(const AuditConfig& config, std::ostream& log) {
  const fs::path out = config.output_dir;
  AuditOutcome outcome = RunAudit(config, out / "missing_texts.txt");
  WriteFile(out / "results.csv", ResultsCsv(outcome.results));
  WriteFile(out / "results.json", ResultsJson(config, outcome));
  WriteFile(out / "plot.csv", PlotCsv(outcome.results));
  WriteFile(out / "figure.svg", FigureSvg(outcome.results));
  WriteFile(out / "model.json", ModelToJson(outcome.model) + "\n");
  std::string diffs =
      "nationality,template_id,adjective,adjective_polarity,diff\n";
  for (const PairedDiff& d : outcome.diffs) {
    diffs += CsvRow({d.nationality, d.template_id, d.adjective,
                     std::to_string(d.adjective_polarity), Num(d.diff)});
  }
  WriteFile(out / "diffs.csv", diffs);
  log << fmt::format(
      "trained {} on {} instances (held-out accuracy {:.4f}); {} probe groups, {} "
      "paired diffs\n",
      ToString(config.classifier), outcome.n_training,
      outcome.train_report.heldout_accuracy, outcome.n_probe_groups,
      outcome.diffs.size());
  log << ResultsTable(outcome.results);
  log << "wrote results to " << out.string() << "\n";
  return outcome;
}

std::vector<CorpusStats> CmdCorpusStats(const AuditConfig& config,
                                        const CorpusStatsOptions& options,
                                        std::ostream& log) {
  std::vector<std::string> warnings;
  const std::vector<LexiconEntry> lexicon = LoadLanguageLexicon(config, &warnings);
  const std::vector<std::string> nationalities = SelectNationalities(config, lexicon);
  const std::vector<fs::path> corpus =
      options.corpus.empty() ? config.corpus : options.corpus;
  if (corpus.empty()) throw ValidationError("no corpus files given");
  for (const fs::path& p : corpus) {
    if (!fs::exists(p)) throw ValidationError("corpus file not found: " + p.string());
  }
  const std::string& mask = config.backend.mask_token;
  const ExtractedSentences extracted = ExtractSentencesFromFiles(
      corpus, nationalities,
      {.layout = config.corpus_layout, .case_sensitive = options.case_sensitive});
  log << fmt::format("{} documents, {} sentences", extracted.documents,
                     extracted.sentences);
  if (extracted.skipped_chunks != 0) {
    log << fmt::format(", {} skipped (invalid UTF-8)", extracted.skipped_chunks);
  }
  log << "\n";

  std::vector<CorpusStats> stats;
  if (options.emit_masked) {
    std::string listing;
    std::set<std::string> seen;
    for (const std::string& nationality : nationalities) {
      const auto& sentences = extracted.by_term.at(nationality);
      for (const std::string& s : sentences) {
        std::string masked = MaskMentions(s, nationality, mask, options.case_sensitive);
        if (seen.insert(masked).second) listing += masked + "\n";
      }
      stats.push_back({nationality, std::nullopt, sentences.size()});
    }
    WriteFile(config.output_dir / "masked_sentences.txt", listing);
    log << fmt::format("wrote {} masked sentences for external scoring to {}\n",
                       seen.size(),
                       (config.output_dir / "masked_sentences.txt").string());
  } else {
    std::unique_ptr<SentenceScorer> scorer;
    std::unique_ptr<Encoder> encoder;
    SentimentModel model;
    if (options.score_store) {
      scorer = std::make_unique<ScoreStore>(*options.score_store);
    } else if (options.model) {
      ValidateConfig(config);
      model = LoadModel(*options.model);
      encoder = BuildEncoder(config, lexicon);
      scorer = std::make_unique<ClassifierScorer>(model, *encoder);
    } else {
      throw ValidationError("corpus-stats needs --scores, --model or --emit-masked");
    }
    for (const std::string& nationality : nationalities) {
      try {
        stats.push_back(ContextPositivity(nationality,
                                          extracted.by_term.at(nationality), *scorer,
                                          mask, options.case_sensitive));
      } catch (const Error& e) {
        throw e.WithContext(nationality);
      }
    }
  }
  WriteFile(config.output_dir / "corpus_stats.csv", CorpusStatsCsv(stats));
  for (const CorpusStats& s : stats) {
    log << fmt::format("{:<16} {:>8} {:>10}\n", s.nationality,
                       s.context_positivity ? fmt::format("{:.3f}", *s.context_positivity)
                                            : std::string("-"),
                       s.n_sentences);
  }
  log << "wrote " << (config.output_dir / "corpus_stats.csv").string() << "\n";
  return stats;
}

CorrelationReport CmdCorrelate(const fs::path& corpus_stats, const fs::path& results,
                               const fs::path& output_dir, std::ostream& log) {
  const std::vector<CorpusStats> stats = ReadCorpusStatsCsv(corpus_stats);
  const std::vector<NationalityResult> rs = ReadResultsCsv(results);
  const CorrelationReport report = Correlate(stats, rs);
  json doc = {
      {"r", report.pearson.r},
      {"p_two_sided", report.pearson.p_two_sided},
      {"n", report.pearson.n},
      {"aligned", report.aligned},
      {"only_in_corpus_stats", report.only_in_corpus},
      {"only_in_results", report.only_in_results},
  };
  WriteFile(output_dir / "correlation.json", doc.dump(2) + "\n");
  log << fmt::format("Pearson r = {:.4f}, p = {:.3g}, n = {}\n", report.pearson.r,
                     report.pearson.p_two_sided, report.pearson.n);
  for (const std::string& n : report.only_in_corpus) {
    log << "excluded (no result): " << n << "\n";
  }
  for (const std::string& n : report.only_in_results) {
    log << "excluded (no corpus positivity): " << n << "\n";
  }
  return report;
}

std::vector<RobustnessCell> CmdRobustness(const RobustnessPlan& plan,
                                          std::ostream& log) {
  std::map<std::string, std::vector<NationalityResult>> sets;
  for (const auto& [name, setup] : plan.setups) {
    CheckSetupName(name);
    AuditConfig config = setup;
    config.output_dir = plan.output_dir / name;
    log << "== setup " << name << "\n";
    try {
      sets[name] = CmdAudit(config, log).results;
    } catch (const Error& e) {
      throw e.WithContext("setup " + name);
    }
  }
  const std::vector<RobustnessCell> cells = RobustnessMatrix(sets);
  WriteFile(plan.output_dir / "robustness.csv", RobustnessCsv(cells));
  for (const RobustnessCell& c : cells) {
    if (c.setup_a == c.setup_b) continue;
    log << fmt::format("{} vs {}: r = {:.4f} (p = {:.3g}, n = {})\n", c.setup_a,
                       c.setup_b, c.pearson.r, c.pearson.p_two_sided, c.pearson.n);
  }
  log << "wrote " << (plan.output_dir / "robustness.csv").string() << "\n";
  return cells;
}

std::vector<RobustnessCell> CmdRobustnessFromResults(
    const std::vector<std::pair<std::string, fs::path>>& results,
    const fs::path& output_dir, std::ostream& log) {
  std::map<std::string, std::vector<NationalityResult>> sets;
  for (const auto& [name, path] : results) {
    if (!sets.emplace(name, ReadResultsCsv(path)).second) {
      throw ValidationError("duplicate setup name " + name);
    }
  }
  const std::vector<RobustnessCell> cells = RobustnessMatrix(sets);
  WriteFile(output_dir / "robustness.csv", RobustnessCsv(cells));
  for (const RobustnessCell& c : cells) {
    if (c.setup_a == c.setup_b) continue;
    log << fmt::format("{} vs {}: r = {:.4f} (p = {:.3g}, n = {})\n", c.setup_a,
                       c.setup_b, c.pearson.r, c.pearson.p_two_sided, c.pearson.n);
  }
  return cells;
}

void CmdReport(const fs::path& results, const fs::path& output_dir, std::ostream& log) {
  const std::vector<NationalityResult> rs = ReadResultsCsv(results);
  WriteFile(output_dir / "plot.csv", PlotCsv(rs));
  WriteFile(output_dir / "figure.svg", FigureSvg(rs));
  log << ResultsTable(rs);
  log << "wrote " << (output_dir / "plot.csv").string() << " and "
      << (output_dir / "figure.svg").string() << "\n";
}

}  // namespace natbias::cli
