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

// Templates, lexicons, and the generators built on them.
//
// A template is a sentence pattern with bracketed slot markers, e.g.
//
//   "This [Noun] is making me feel [Adj]."
//   "This [Nationality] person is [Adj]."
//
// Training templates carry [Noun] and [Adj]; the adjective polarity is the
// instance label. Probe templates carry [Nationality] and at most one filler
// slot ([Adj], [State] or [Situation]); every rendered variant is paired with
// a baseline whose nationality slot holds the model's mask token. Slot
// substitution is plain string replacement with no agreement repair.

#ifndef NATBIAS_LEXICA_H_
#define NATBIAS_LEXICA_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace natbias {

enum class Slot { kNoun, kAdj, kNationality, kState, kSituation };

// "[Noun]", "[Adj]", "[Nationality]", "[State]", "[Situation]".
std::string_view SlotMarker(Slot slot);
std::optional<Slot> SlotFromName(std::string_view name);

enum class TemplateSource { kNative, kEec, kCorpusMined };

std::string_view ToString(TemplateSource source);
TemplateSource ParseTemplateSource(std::string_view text);

struct Template {
  std::string id;
  std::string language;
  std::string pattern;
  TemplateSource source = TemplateSource::kNative;

  // Distinct slots in order of first appearance. Throws on unknown markers.
  std::vector<Slot> Slots() const;
  bool HasSlot(Slot slot) const;
};

// Throws Error(kValidation) if the pattern has no slot or an unknown marker.
void ValidateTemplate(const Template& t);

enum class LexiconKind {
  kNoun,
  kPolarAdjective,
  kNeutralAdjective,
  kNationality,
  kStateWord,
  kSituationWord,
};

std::string_view ToString(LexiconKind kind);
LexiconKind ParseLexiconKind(std::string_view text);

struct LexiconEntry {
  std::string surface;
  LexiconKind kind = LexiconKind::kNoun;
  int polarity = 0;
  std::string language;

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

// Polar adjectives must be +-1; neutral adjectives and nationalities 0.
void ValidateEntry(const LexiconEntry& entry);

struct LexiconLoad {
  std::vector<LexiconEntry> entries;
  std::map<LexiconKind, std::size_t> counts;
  std::vector<std::string> warnings;
};

// Parses a JSON array of {surface, kind, polarity, language}. Validation
// errors name the offending entry index and its line in the source text.
// Empty input yields an empty lexicon and a warning.
LexiconLoad ParseLexicon(std::string_view json_text,
                         std::string_view origin = "<memory>");
LexiconLoad LoadLexicon(const std::filesystem::path& path);

// Parses a JSON array of {id, language, pattern, source}.
std::vector<Template> ParseTemplates(std::string_view json_text,
                                     std::string_view origin = "<memory>");
std::vector<Template> LoadTemplates(const std::filesystem::path& path);

// Entries of `kind`; an empty `language` matches every language.
std::vector<LexiconEntry> SelectEntries(std::span<const LexiconEntry> entries,
                                        LexiconKind kind,
                                        std::string_view language = {});

using SlotBindings = std::map<Slot, std::string>;

// Replaces every marker occurrence with its binding. Bound text is never
// rescanned, so a binding may itself contain brackets (e.g. "[MASK]").
std::string Render(const Template& t, const SlotBindings& bindings);

struct TrainingInstance {
  std::string text;
  int label = 0;  // +1 or -1, the adjective polarity
  std::string template_id;
  std::string adjective;
};

// Cross product templates x nouns x polar adjectives, ordered by template
// id, then noun surface, then adjective surface.
std::vector<TrainingInstance> GenerateTraining(
    std::span<const Template> templates, std::span<const LexiconEntry> nouns,
    std::span<const LexiconEntry> polar_adjectives);

struct ProbeVariant {
  std::string nationality;
  std::string text;
};

struct ProbeGroup {
  std::string template_id;
  std::string adjective;  // empty when the template has no filler slot
  int adjective_polarity = 0;
  std::string baseline_text;
  std::vector<ProbeVariant> variants;
};

// One group per (template, filler word). Templates with an [Adj] slot take
// neutral adjectives, [State] takes state words, [Situation] situation
// words; templates with no filler slot yield a single group. Groups are
// ordered by template id then filler surface; variants follow the order of
// `nationalities`.
std::vector<ProbeGroup> GenerateProbes(
    std::span<const Template> templates, std::span<const LexiconEntry> fillers,
    std::span<const std::string> nationalities, std::string_view mask_token);

// Number of ProbeGroups GenerateProbes would return.
std::size_t CountProbeGroups(std::span<const Template> templates,
                             std::span<const LexiconEntry> fillers);

struct MineOptions {
  std::string language;
  bool case_sensitive = true;
};

struct MinedTemplates {
  std::vector<Template> templates;
  // Sentences with more than one term occurrence; only the first was slotted.
  std::vector<std::string> multi_match;
  // Sentences that could not become templates (bracketed tokens that would
  // parse as slot markers).
  std::size_t skipped = 0;
};

// Turns each sentence mentioning a term into a [Nationality] template by
// replacing the earliest word-boundary occurrence (longest term on ties).
// Duplicate patterns are dropped; output follows first appearance.
MinedTemplates MineCorpusTemplates(std::span<const std::string> sentences,
                                   std::span<const std::string> terms,
                                   const MineOptions& options = {});

}  // namespace natbias

#endif  // NATBIAS_LEXICA_H_
