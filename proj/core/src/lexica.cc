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

#include "natbias/lexica.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>
#include <variant>

#include <nlohmann/json.hpp>
#include "natbias/error.h"
#include "natbias/text.h"

namespace natbias {
namespace {

using json = nlohmann::json;

// A pattern split into literal runs and slot markers.
using Piece = std::variant<std::string_view, Slot>;

bool IsAsciiAlpha(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

std::vector<Piece> Tokenize(std::string_view pattern) {
  std::vector<Piece> pieces;
  std::size_t literal_start = 0;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '[') {
      ++i;
      continue;
    }
    const std::size_t close = pattern.find(']', i + 1);
    if (close == std::string_view::npos) break;
    const std::string_view name = pattern.substr(i + 1, close - i - 1);
    if (name.empty() || !std::all_of(name.begin(), name.end(), IsAsciiAlpha)) {
      ++i;
      continue;
    }
    const std::optional<Slot> slot = SlotFromName(name);
    if (!slot) {
      throw ValidationError("unknown slot marker [" + std::string(name) +
                            "] in pattern \"" + std::string(pattern) + "\"");
    }
    if (i > literal_start) {
      pieces.emplace_back(pattern.substr(literal_start, i - literal_start));
    }
    pieces.emplace_back(*slot);
    i = close + 1;
    literal_start = i;
  }
  if (literal_start < pattern.size()) {
    pieces.emplace_back(pattern.substr(literal_start));
  }
  return pieces;
}

std::size_t LineAt(std::string_view text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(),
                            text.begin() + std::min(offset, text.size()), '\n'));
}

// Line numbers of each object that starts directly inside the top-level
// array. String contents are skipped so braces in text do not count.
std::vector<std::size_t> ElementLines(std::string_view text) {
  std::vector<std::size_t> lines;
  int depth = 0;
  bool in_string = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '{':
      case '[':
        if (depth == 1) lines.push_back(line);
        ++depth;
        break;
      case '}':
      case ']':
        --depth;
        break;
      default:
        break;
    }
  }
  return lines;
}

json ParseJsonArray(std::string_view json_text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(origin) + ":" +
                          std::to_string(LineAt(json_text, e.byte)) +
                          ": JSON parse error: " + e.what());
  }
  if (!doc.is_array()) {
    throw ValidationError(std::string(origin) + ": expected a JSON array");
  }
  return doc;
}

std::string RequireString(const json& obj, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw ValidationError(std::string("missing or non-string field '") +
                          field + "'");
  }
  return it->get<std::string>();
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

template <typename T, typename Key>
std::vector<T> SortedBy(std::span<const T> items, Key key) {
  std::vector<T> sorted(items.begin(), items.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const T& a, const T& b) { return key(a) < key(b); });
  return sorted;
}

std::optional<LexiconKind> FillerKindFor(Slot slot) {
  switch (slot) {
    case Slot::kAdj:
      return LexiconKind::kNeutralAdjective;
    case Slot::kState:
      return LexiconKind::kStateWord;
    case Slot::kSituation:
      return LexiconKind::kSituationWord;
    default:
      return std::nullopt;
  }
}

// The single filler slot of a probe template, if any.
std::optional<Slot> ProbeFillerSlot(const Template& t) {
  std::optional<Slot> filler;
  bool has_nationality = false;
  for (const Slot slot : t.Slots()) {
    if (slot == Slot::kNationality) {
      has_nationality = true;
    } else if (slot == Slot::kNoun) {
      throw ValidationError("probe template " + t.id +
                            " must not contain a [Noun] slot");
    } else if (filler) {
      throw ValidationError("probe template " + t.id +
                            " has more than one filler slot");
    } else {
      filler = slot;
    }
  }
  if (!has_nationality) {
    throw ValidationError("probe template " + t.id +
                          " lacks a [Nationality] slot");
  }
  return filler;
}

}  // namespace

std::string_view SlotMarker(Slot slot) {
  switch (slot) {
    case Slot::kNoun:
      return "[Noun]";
    case Slot::kAdj:
      return "[Adj]";
    case Slot::kNationality:
      return "[Nationality]";
    case Slot::kState:
      return "[State]";
    case Slot::kSituation:
      return "[Situation]";
  }
  return "";
}

std::optional<Slot> SlotFromName(std::string_view name) {
  if (name == "Noun") return Slot::kNoun;
  if (name == "Adj") return Slot::kAdj;
  if (name == "Nationality") return Slot::kNationality;
  if (name == "State") return Slot::kState;
  if (name == "Situation") return Slot::kSituation;
  return std::nullopt;
}

std::string_view ToString(TemplateSource source) {
  switch (source) {
    case TemplateSource::kNative:
      return "native";
    case TemplateSource::kEec:
      return "eec";
    case TemplateSource::kCorpusMined:
      return "corpus-mined";
  }
  return "";
}

TemplateSource ParseTemplateSource(std::string_view text) {
  if (text == "native") return TemplateSource::kNative;
  if (text == "eec") return TemplateSource::kEec;
  if (text == "corpus-mined") return TemplateSource::kCorpusMined;
  throw ValidationError("unknown template source '" + std::string(text) + "'");
}

std::vector<Slot> Template::Slots() const {
  std::vector<Slot> slots;
  for (const Piece& piece : Tokenize(pattern)) {
    if (const Slot* slot = std::get_if<Slot>(&piece)) {
      if (std::find(slots.begin(), slots.end(), *slot) == slots.end()) {
        slots.push_back(*slot);
      }
    }
  }
  return slots;
}

bool Template::HasSlot(Slot slot) const {
  const std::vector<Slot> slots = Slots();
  return std::find(slots.begin(), slots.end(), slot) != slots.end();
}

void ValidateTemplate(const Template& t) {
  if (t.id.empty()) throw ValidationError("template with empty id");
  if (t.Slots().empty()) {
    throw ValidationError("template " + t.id + " has no slot marker");
  }
}

std::string_view ToString(LexiconKind kind) {
  switch (kind) {
    case LexiconKind::kNoun:
      return "noun";
    case LexiconKind::kPolarAdjective:
      return "polar-adjective";
    case LexiconKind::kNeutralAdjective:
      return "neutral-adjective";
    case LexiconKind::kNationality:
      return "nationality";
    case LexiconKind::kStateWord:
      return "state-word";
    case LexiconKind::kSituationWord:
      return "situation-word";
  }
  return "";
}

LexiconKind ParseLexiconKind(std::string_view text) {
  for (const LexiconKind kind :
       {LexiconKind::kNoun, LexiconKind::kPolarAdjective,
        LexiconKind::kNeutralAdjective, LexiconKind::kNationality,
        LexiconKind::kStateWord, LexiconKind::kSituationWord}) {
    if (text == ToString(kind)) return kind;
  }
  throw ValidationError("unknown lexicon kind '" + std::string(text) + "'");
}

void ValidateEntry(const LexiconEntry& entry) {
  if (entry.surface.empty()) throw ValidationError("empty surface form");
  if (entry.polarity < -1 || entry.polarity > 1) {
    throw ValidationError("polarity must be -1, 0 or +1");
  }
  switch (entry.kind) {
    case LexiconKind::kPolarAdjective:
      if (entry.polarity == 0) {
        throw ValidationError("polar-adjective '" + entry.surface +
                              "' must have polarity -1 or +1");
      }
      break;
    case LexiconKind::kNeutralAdjective:
    case LexiconKind::kNationality:
      if (entry.polarity != 0) {
        throw ValidationError(std::string(ToString(entry.kind)) + " '" +
                              entry.surface + "' must have polarity 0");
      }
      break;
    default:
      break;
  }
}

LexiconLoad ParseLexicon(std::string_view json_text, std::string_view origin) {
  LexiconLoad load;
  if (Trim(json_text).empty()) {
    load.warnings.push_back(std::string(origin) + ": empty lexicon file");
    return load;
  }
  const json doc = ParseJsonArray(json_text, origin);
  const std::vector<std::size_t> lines = ElementLines(json_text);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    LexiconEntry entry;
    try {
      if (!item.is_object()) throw ValidationError("entry is not an object");
      entry.surface = RequireString(item, "surface");
      entry.kind = ParseLexiconKind(RequireString(item, "kind"));
      const auto polarity = item.find("polarity");
      if (polarity == item.end() || !polarity->is_number_integer()) {
        throw ValidationError("missing or non-integer field 'polarity'");
      }
      entry.polarity = polarity->get<int>();
      entry.language = RequireString(item, "language");
      ValidateEntry(entry);
    } catch (const Error& e) {
      std::string where = std::string(origin);
      if (i < lines.size()) where += ":" + std::to_string(lines[i]);
      where += ": entry " + std::to_string(i);
      throw e.WithContext(where);
    }
    ++load.counts[entry.kind];
    load.entries.push_back(std::move(entry));
  }
  if (load.entries.empty()) {
    load.warnings.push_back(std::string(origin) + ": lexicon has no entries");
  }
  return load;
}

LexiconLoad LoadLexicon(const std::filesystem::path& path) {
  return ParseLexicon(ReadFile(path), path.string());
}

std::vector<Template> ParseTemplates(std::string_view json_text,
                                     std::string_view origin) {
  const json doc = ParseJsonArray(json_text, origin);
  const std::vector<std::size_t> lines = ElementLines(json_text);
  std::vector<Template> templates;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    Template t;
    try {
      if (!item.is_object()) throw ValidationError("entry is not an object");
      t.id = RequireString(item, "id");
      t.language = RequireString(item, "language");
      t.pattern = RequireString(item, "pattern");
      t.source = ParseTemplateSource(RequireString(item, "source"));
      ValidateTemplate(t);
      if (!ids.insert(t.id).second) {
        throw ValidationError("duplicate template id " + t.id);
      }
    } catch (const Error& e) {
      std::string where = std::string(origin);
      if (i < lines.size()) where += ":" + std::to_string(lines[i]);
      where += ": template " + std::to_string(i);
      throw e.WithContext(where);
    }
    templates.push_back(std::move(t));
  }
  return templates;
}

std::vector<Template> LoadTemplates(const std::filesystem::path& path) {
  return ParseTemplates(ReadFile(path), path.string());
}

std::vector<LexiconEntry> SelectEntries(std::span<const LexiconEntry> entries,
                                        LexiconKind kind,
                                        std::string_view language) {
  std::vector<LexiconEntry> out;
  for (const LexiconEntry& e : entries) {
    if (e.kind == kind && (language.empty() || e.language == language)) {
      out.push_back(e);
    }
  }
  return out;
}

std::string Render(const Template& t, const SlotBindings& bindings) {
  std::string out;
  out.reserve(t.pattern.size() + 32);
  for (const Piece& piece : Tokenize(t.pattern)) {
    if (const auto* literal = std::get_if<std::string_view>(&piece)) {
      out.append(*literal);
      continue;
    }
    const Slot slot = std::get<Slot>(piece);
    const auto it = bindings.find(slot);
    if (it == bindings.end()) {
      throw ValidationError("template " + t.id + ": missing binding for " +
                            std::string(SlotMarker(slot)));
    }
    out.append(it->second);
  }
  return out;
}

std::vector<TrainingInstance> GenerateTraining(
    std::span<const Template> templates, std::span<const LexiconEntry> nouns,
    std::span<const LexiconEntry> polar_adjectives) {
  if (templates.empty() || nouns.empty() || polar_adjectives.empty()) {
    throw ValidationError(
        "training generation needs non-empty templates, nouns and "
        "adjectives");
  }
  for (const Template& t : templates) {
    const std::vector<Slot> slots = t.Slots();
    const bool ok = t.HasSlot(Slot::kNoun) && t.HasSlot(Slot::kAdj) &&
                    slots.size() == 2;
    if (!ok) {
      throw ValidationError("training template " + t.id +
                            " must contain exactly [Noun] and [Adj]");
    }
  }
  for (const LexiconEntry& adj : polar_adjectives) {
    if (adj.polarity != 1 && adj.polarity != -1) {
      throw ValidationError("training adjective '" + adj.surface +
                            "' is not polar");
    }
  }

  const auto by_id = SortedBy(templates, [](const Template& t) { return t.id; });
  const auto by_surface = [](const LexiconEntry& e) { return e.surface; };
  const auto sorted_nouns = SortedBy(nouns, by_surface);
  const auto sorted_adjectives = SortedBy(polar_adjectives, by_surface);

  std::vector<TrainingInstance> out;
  out.reserve(by_id.size() * sorted_nouns.size() * sorted_adjectives.size());
  for (const Template& t : by_id) {
    for (const LexiconEntry& noun : sorted_nouns) {
      for (const LexiconEntry& adj : sorted_adjectives) {
        out.push_back({
            .text = Render(t, {{Slot::kNoun, noun.surface},
                               {Slot::kAdj, adj.surface}}),
            .label = adj.polarity,
            .template_id = t.id,
            .adjective = adj.surface,
        });
      }
    }
  }
  return out;
}

std::size_t CountProbeGroups(std::span<const Template> templates,
                             std::span<const LexiconEntry> fillers) {
  std::size_t count = 0;
  for (const Template& t : templates) {
    const std::optional<Slot> filler = ProbeFillerSlot(t);
    if (!filler) {
      ++count;
      continue;
    }
    const LexiconKind kind = *FillerKindFor(*filler);
    count += static_cast<std::size_t>(
        std::count_if(fillers.begin(), fillers.end(),
                      [&](const LexiconEntry& e) { return e.kind == kind; }));
  }
  return count;
}

std::vector<ProbeGroup> GenerateProbes(
    std::span<const Template> templates, std::span<const LexiconEntry> fillers,
    std::span<const std::string> nationalities, std::string_view mask_token) {
  if (templates.empty()) throw ValidationError("no probe templates");
  if (nationalities.empty()) throw ValidationError("empty nationality list");
  if (mask_token.empty()) throw ValidationError("empty mask token");
  for (const std::string& n : nationalities) {
    if (n.empty()) throw ValidationError("empty nationality surface");
  }

  const auto by_id = SortedBy(templates, [](const Template& t) { return t.id; });
  const auto sorted_fillers =
      SortedBy(fillers, [](const LexiconEntry& e) { return e.surface; });

  std::vector<ProbeGroup> groups;
  for (const Template& t : by_id) {
    const std::optional<Slot> filler_slot = ProbeFillerSlot(t);

    std::vector<const LexiconEntry*> words;
    if (filler_slot) {
      const LexiconKind kind = *FillerKindFor(*filler_slot);
      for (const LexiconEntry& e : sorted_fillers) {
        if (e.kind == kind) words.push_back(&e);
      }
      if (words.empty()) {
        throw ValidationError("template " + t.id + " needs " +
                              std::string(ToString(kind)) +
                              " entries but none were given");
      }
    } else {
      words.push_back(nullptr);
    }

    for (const LexiconEntry* word : words) {
      SlotBindings bindings;
      ProbeGroup group;
      group.template_id = t.id;
      if (word != nullptr) {
        bindings[*filler_slot] = word->surface;
        group.adjective = word->surface;
        group.adjective_polarity = word->polarity;
      }
      bindings[Slot::kNationality] = std::string(mask_token);
      group.baseline_text = Render(t, bindings);
      group.variants.reserve(nationalities.size());
      for (const std::string& nationality : nationalities) {
        bindings[Slot::kNationality] = nationality;
        group.variants.push_back({nationality, Render(t, bindings)});
      }
      groups.push_back(std::move(group));
    }
  }
  return groups;
}

MinedTemplates MineCorpusTemplates(std::span<const std::string> sentences,
                                   std::span<const std::string> terms,
                                   const MineOptions& options) {
  if (terms.empty()) throw ValidationError("no nationality terms to mine");
  MinedTemplates mined;
  std::unordered_set<std::string> seen;
  const std::string marker(SlotMarker(Slot::kNationality));
  for (const std::string& sentence : sentences) {
    std::vector<TextSpan> matches;
    for (const std::string& term : terms) {
      const auto found =
          FindWordOccurrences(sentence, term, options.case_sensitive);
      matches.insert(matches.end(), found.begin(), found.end());
    }
    if (matches.empty()) continue;
    std::sort(matches.begin(), matches.end(),
              [](const TextSpan& a, const TextSpan& b) {
                if (a.begin != b.begin) return a.begin < b.begin;
                return a.end > b.end;
              });
    const TextSpan first = matches.front();
    const bool multiple = std::any_of(
        matches.begin() + 1, matches.end(),
        [&](const TextSpan& s) { return s.begin >= first.end; });
    if (multiple) mined.multi_match.push_back(sentence);

    Template t;
    t.language = options.language;
    t.source = TemplateSource::kCorpusMined;
    t.pattern = ReplaceSpans(sentence, {first}, marker);
    try {
      const std::vector<Slot> slots = t.Slots();
      if (slots.size() != 1) throw ValidationError("extra slot markers");
    } catch (const Error&) {
      ++mined.skipped;
      continue;
    }
    if (!seen.insert(t.pattern).second) continue;
    t.id = "mined-" + Sha256Hex(t.pattern).substr(0, 16);
    mined.templates.push_back(std::move(t));
  }
  return mined;
}

}  // namespace natbias
