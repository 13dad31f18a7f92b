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

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <set>
#include <tuple>

#include "natbias/error.h"
#include "natbias/random.h"

namespace natbias {
namespace {

const std::filesystem::path kData = NATBIAS_TEST_DATA_DIR;

Template Make(std::string id, std::string pattern,
              TemplateSource source = TemplateSource::kNative) {
  return {std::move(id), "en", std::move(pattern), source};
}

LexiconEntry Entry(std::string surface, LexiconKind kind, int polarity) {
  return {std::move(surface), kind, polarity, "en"};
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

TEST(LexiconTest, LoadsPolarAdjectives) {
  const LexiconLoad load = ParseLexicon(R"([
    {"surface": "happy", "kind": "polar-adjective", "polarity": 1, "language": "en"},
    {"surface": "angry", "kind": "polar-adjective", "polarity": -1, "language": "en"}
  ])");
  ASSERT_EQ(load.entries.size(), 2u);
  EXPECT_EQ(load.counts.at(LexiconKind::kPolarAdjective), 2u);
  EXPECT_EQ(load.entries[0].polarity, 1);
  EXPECT_EQ(load.entries[1].polarity, -1);
  EXPECT_TRUE(load.warnings.empty());
}

TEST(LexiconTest, EmptyFileWarns) {
  LexiconLoad load = ParseLexicon("");
  EXPECT_TRUE(load.entries.empty());
  EXPECT_EQ(load.warnings.size(), 1u);
  load = ParseLexicon("[]");
  EXPECT_TRUE(load.entries.empty());
  EXPECT_EQ(load.warnings.size(), 1u);
}

TEST(LexiconTest, PolarityKindMismatchReportsLine) {
  const std::string text = R"([
  {"surface": "average", "kind": "neutral-adjective", "polarity": 0, "language": "en"},
  {"surface": "neutral", "kind": "neutral-adjective", "polarity": 1, "language": "en"}
])";
  try {
    ParseLexicon(text, "lex.json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("lex.json:3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("neutral"), std::string::npos);
  }
}

TEST(LexiconTest, RejectsBadEntries) {
  EXPECT_THROW(ValidateEntry(Entry("happy", LexiconKind::kPolarAdjective, 0)), Error);
  EXPECT_THROW(ValidateEntry(Entry("Syrian", LexiconKind::kNationality, -1)), Error);
  EXPECT_THROW(ValidateEntry(Entry("", LexiconKind::kNoun, 0)), Error);
  EXPECT_THROW(ValidateEntry(Entry("x", LexiconKind::kStateWord, 2)), Error);
  EXPECT_NO_THROW(ValidateEntry(Entry("glad", LexiconKind::kStateWord, 1)));
  EXPECT_THROW(ParseLexicon("{}"), Error);
  EXPECT_THROW(ParseLexicon("[{\"surface\": \"a\"}]"), Error);
  EXPECT_THROW(ParseLexicon("[1,"), Error);
}

TEST(LexiconTest, BundledFixturesLoad) {
  for (const char* name : {"multilingual.json", "en_extra.json", "eec_words.json"}) {
    const LexiconLoad load = LoadLexicon(kData / "lexica" / name);
    EXPECT_FALSE(load.entries.empty()) << name;
    EXPECT_TRUE(load.warnings.empty()) << name;
  }
  const LexiconLoad multilingual = LoadLexicon(kData / "lexica/multilingual.json");
  // Six languages, each with 2 nouns, 2 polar adjectives, 2 nationalities
  // and 2 neutral adjectives.
  EXPECT_EQ(multilingual.entries.size(), 6u * 8u);
  EXPECT_EQ(SelectEntries(multilingual.entries, LexiconKind::kNationality, "tr").size(), 2u);
  EXPECT_THROW(LoadLexicon(kData / "lexica/missing.json"), Error);
}

TEST(TemplateTest, BundledTemplatesLoad) {
  const auto t1 = LoadTemplates(kData / "templates/multilingual_training.json");
  EXPECT_EQ(t1.size(), 6u);
  const auto eec = LoadTemplates(kData / "templates/eec_probes.json");
  ASSERT_EQ(eec.size(), 11u);
  for (const Template& t : eec) {
    EXPECT_EQ(t.source, TemplateSource::kEec);
    EXPECT_TRUE(t.HasSlot(Slot::kNationality));
  }
}

TEST(TemplateTest, ParseValidation) {
  EXPECT_THROW(ParseTemplates(R"([{"id": "a", "language": "en", "pattern": "no slots", "source": "native"}])"),
               Error);
  EXPECT_THROW(ParseTemplates(R"([{"id": "a", "language": "en", "pattern": "[Color] x", "source": "native"}])"),
               Error);
  EXPECT_THROW(ParseTemplates(R"([{"id": "a", "language": "en", "pattern": "[Adj] x", "source": "other"}])"),
               Error);
  EXPECT_THROW(ParseTemplates(R"([
    {"id": "a", "language": "en", "pattern": "[Adj] x", "source": "native"},
    {"id": "a", "language": "en", "pattern": "[Adj] y", "source": "native"}])"),
               Error);
}

TEST(TemplateTest, SlotsInOrder) {
  const Template t = Make("t", "[Adj] and [Noun] and [Adj]");
  EXPECT_EQ(t.Slots(), (std::vector<Slot>{Slot::kAdj, Slot::kNoun}));
  EXPECT_FALSE(t.HasSlot(Slot::kNationality));
}

TEST(RenderTest, TableOneEnglish) {
  const Template t = Make("en", "This [Noun] is making me feel [Adj].");
  EXPECT_EQ(Render(t, {{Slot::kNoun, "experience"}, {Slot::kAdj, "happy"}}),
            "This experience is making me feel happy.");
}

TEST(RenderTest, NoSlotsIsIdentity) {
  const Template t = Make("plain", "Nothing to fill here.");
  EXPECT_EQ(Render(t, {}), "Nothing to fill here.");
}

TEST(RenderTest, MissingBindingFails) {
  const Template t = Make("p", "This [Nationality] person is [Adj].");
  EXPECT_EQ(KindOf([&] { Render(t, {{Slot::kAdj, "neutral"}}); }), ErrorKind::kValidation);
}

TEST(RenderTest, UnknownMarkerFails) {
  const Template t = Make("p", "This [Colour] person.");
  EXPECT_THROW(Render(t, {}), Error);
}

TEST(RenderTest, BoundTextIsNotRescanned) {
  const Template t = Make("p", "[Noun] then [Adj]");
  EXPECT_EQ(Render(t, {{Slot::kNoun, "[Adj]"}, {Slot::kAdj, "x"}}), "[Adj] then x");
}

TEST(RenderTest, RepeatedMarkerAndNonAsciiAttachment) {
  EXPECT_EQ(Render(Make("r", "[Adj], very [Adj]"), {{Slot::kAdj, "calm"}}),
            "calm, very calm");
  const Template ar = {"ar-probe-01", "ar", "هذا الشخص ال[Nationality] [Adj]",
                       TemplateSource::kNative};
  EXPECT_EQ(Render(ar, {{Slot::kNationality, "سوري"}, {Slot::kAdj, "محايد"}}),
            "هذا الشخص السوري محايد");
}

TEST(RenderTest, InjectiveOverDistinctBindings) {
  const Template t = Make("p", "The [Noun] felt [Adj] to the [Nationality].");
  Rng rng(17);
  std::set<std::string> outputs;
  std::set<std::tuple<std::string, std::string, std::string>> inputs;
  auto word = [&] {
    std::string w;
    const auto len = 1 + rng.Below(4);
    for (uint64_t i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + rng.Below(3)));
    return w;
  };
  for (int i = 0; i < 500; ++i) {
    const std::string a = word(), b = word(), c = word();
    if (!inputs.emplace(a, b, c).second) continue;
    outputs.insert(Render(t, {{Slot::kNoun, a}, {Slot::kAdj, b}, {Slot::kNationality, c}}));
  }
  EXPECT_EQ(outputs.size(), inputs.size());
}

TEST(TrainingTest, CrossProductCounts) {
  const std::vector<Template> templates = {
      Make("t2", "The [Noun] was [Adj]."),
      Make("t1", "This [Noun] is making me feel [Adj]."),
  };
  const std::vector<LexiconEntry> nouns = {Entry("experience", LexiconKind::kNoun, 0),
                                           Entry("day", LexiconKind::kNoun, 0)};
  const std::vector<LexiconEntry> adjs = {Entry("happy", LexiconKind::kPolarAdjective, 1),
                                          Entry("angry", LexiconKind::kPolarAdjective, -1)};
  const auto out = GenerateTraining(templates, nouns, adjs);
  ASSERT_EQ(out.size(), 8u);
  int positive = 0;
  for (const auto& i : out) positive += i.label == 1;
  EXPECT_EQ(positive, 4);
  // Ordered by template id, then noun, then adjective.
  EXPECT_EQ(out[0].text, "This day is making me feel angry.");
  EXPECT_EQ(out[0].template_id, "t1");
  EXPECT_EQ(out[1].text, "This day is making me feel happy.");
  EXPECT_EQ(out[2].text, "This experience is making me feel angry.");
  EXPECT_EQ(out[7].text, "The experience was happy.");
  for (const auto& i : out) {
    EXPECT_EQ(i.label, i.adjective == "happy" ? 1 : -1);
  }
}

TEST(TrainingTest, Singleton) {
  const auto out = GenerateTraining(std::vector<Template>{Make("t", "[Noun] [Adj]")},
                                    std::vector{Entry("day", LexiconKind::kNoun, 0)},
                                    std::vector{Entry("sad", LexiconKind::kPolarAdjective, -1)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].text, "day sad");
  EXPECT_EQ(out[0].label, -1);
}

TEST(TrainingTest, Errors) {
  const std::vector<Template> ok = {Make("t", "[Noun] [Adj]")};
  const std::vector<LexiconEntry> nouns = {Entry("day", LexiconKind::kNoun, 0)};
  const std::vector<LexiconEntry> adjs = {Entry("sad", LexiconKind::kPolarAdjective, -1)};
  EXPECT_THROW(GenerateTraining({}, nouns, adjs), Error);
  EXPECT_THROW(GenerateTraining(ok, {}, adjs), Error);
  EXPECT_THROW(GenerateTraining(ok, nouns, {}), Error);
  EXPECT_THROW(GenerateTraining(std::vector{Make("t", "[Noun] only")}, nouns, adjs), Error);
  EXPECT_THROW(GenerateTraining(ok, nouns,
                                std::vector{Entry("meh", LexiconKind::kNeutralAdjective, 0)}),
               Error);
}

TEST(TrainingTest, LabelDistributionProperty) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Template> templates;
    const auto nt = 1 + rng.Below(4);
    for (uint64_t i = 0; i < nt; ++i) {
      templates.push_back(Make("t" + std::to_string(i), "[Noun] #" + std::to_string(i) + " [Adj]"));
    }
    std::vector<LexiconEntry> nouns, adjs;
    const auto nn = 1 + rng.Below(5);
    for (uint64_t i = 0; i < nn; ++i) nouns.push_back(Entry("n" + std::to_string(i), LexiconKind::kNoun, 0));
    const auto na = 1 + rng.Below(6);
    int positive_adjs = 0;
    for (uint64_t i = 0; i < na; ++i) {
      const int pol = rng.Below(2) ? 1 : -1;
      positive_adjs += pol == 1;
      adjs.push_back(Entry("a" + std::to_string(i), LexiconKind::kPolarAdjective, pol));
    }
    const auto out = GenerateTraining(templates, nouns, adjs);
    ASSERT_EQ(out.size(), nt * nn * na);
    std::size_t positive = 0;
    for (const auto& i : out) positive += i.label == 1;
    EXPECT_EQ(positive, positive_adjs * nt * nn);
  }
}

TEST(ProbeTest, TableOneExample) {
  const std::vector<Template> templates = {Make("en-probe-01", "This [Nationality] person is [Adj].")};
  const std::vector<LexiconEntry> fillers = {Entry("neutral", LexiconKind::kNeutralAdjective, 0),
                                             Entry("average", LexiconKind::kNeutralAdjective, 0)};
  const std::vector<std::string> nationalities = {"Syrian", "American"};
  const auto groups = GenerateProbes(templates, fillers, nationalities, "[MASK]");
  ASSERT_EQ(groups.size(), 2u);
  for (const ProbeGroup& g : groups) EXPECT_EQ(g.variants.size(), 2u);
  EXPECT_EQ(groups[0].adjective, "average");
  EXPECT_EQ(groups[0].baseline_text, "This [MASK] person is average.");
  EXPECT_EQ(groups[0].variants[0].text, "This Syrian person is average.");
  EXPECT_EQ(groups[0].variants[1].nationality, "American");
}

TEST(ProbeTest, Errors) {
  const std::vector<Template> templates = {Make("p", "This [Nationality] person is [Adj].")};
  const std::vector<LexiconEntry> fillers = {Entry("neutral", LexiconKind::kNeutralAdjective, 0)};
  const std::vector<std::string> nats = {"Syrian"};
  EXPECT_THROW(GenerateProbes(templates, {}, nats, "[MASK]"), Error);
  EXPECT_THROW(GenerateProbes(templates, fillers, {}, "[MASK]"), Error);
  EXPECT_THROW(GenerateProbes(templates, fillers, nats, ""), Error);
  EXPECT_THROW(GenerateProbes(std::vector{Make("p", "This person is [Adj].")}, fillers, nats, "[MASK]"),
               Error);
  EXPECT_THROW(GenerateProbes(std::vector{Make("p", "The [Noun] of [Nationality] is [Adj].")},
                              fillers, nats, "[MASK]"),
               Error);
}

TEST(ProbeTest, EecCountOracle) {
  const auto templates = LoadTemplates(kData / "templates/eec_probes.json");
  const auto words = LoadLexicon(kData / "lexica/eec_words.json").entries;
  std::vector<std::string> nats;
  for (int i = 0; i < 15; ++i) nats.push_back("Nat" + std::to_string(i));
  // Count by hand from the template list: which filler slot each one has.
  std::size_t expected = 0;
  std::size_t states = 0, situations = 0;
  for (const auto& w : words) {
    states += w.kind == LexiconKind::kStateWord;
    situations += w.kind == LexiconKind::kSituationWord;
  }
  for (const Template& t : templates) {
    const bool st = t.pattern.find("[State]") != std::string::npos;
    const bool si = t.pattern.find("[Situation]") != std::string::npos;
    expected += st ? states : si ? situations : 1;
  }
  EXPECT_EQ(expected, 4u + 3u * 20u + 4u * 20u);
  const auto groups = GenerateProbes(templates, words, nats, "[MASK]");
  EXPECT_EQ(groups.size(), expected);
  EXPECT_EQ(CountProbeGroups(templates, words), expected);
  std::size_t texts = 0;
  for (const auto& g : groups) texts += 1 + g.variants.size();
  EXPECT_EQ(texts, expected * 16);
}

TEST(ProbeTest, MinimalPairRoundTrip) {
  std::vector<Template> templates = LoadTemplates(kData / "templates/multilingual_probes.json");
  const auto extra = LoadTemplates(kData / "templates/eec_probes.json");
  templates.insert(templates.end(), extra.begin(), extra.end());
  std::vector<LexiconEntry> fillers = LoadLexicon(kData / "lexica/eec_words.json").entries;
  fillers.push_back(Entry("neutral", LexiconKind::kNeutralAdjective, 0));
  const std::vector<std::string> nats = {"Syrian", "South African", "سوري", "X"};
  for (const std::string mask : {"[MASK]", "<mask>"}) {
    for (const ProbeGroup& g : GenerateProbes(templates, fillers, nats, mask)) {
      for (const ProbeVariant& v : g.variants) {
        bool reproduced = false;
        for (auto pos = v.text.find(v.nationality); pos != std::string::npos;
             pos = v.text.find(v.nationality, pos + 1)) {
          std::string s = v.text;
          s.replace(pos, v.nationality.size(), mask);
          reproduced = reproduced || s == g.baseline_text;
        }
        EXPECT_TRUE(reproduced) << v.text << " vs " << g.baseline_text;
      }
    }
  }
}

TEST(MineTest, ReplacesTerm) {
  const std::vector<std::string> sentences = {"The Syrian delegation arrived."};
  const std::vector<std::string> terms = {"Syrian"};
  const auto mined = MineCorpusTemplates(sentences, terms, {.language = "en"});
  ASSERT_EQ(mined.templates.size(), 1u);
  EXPECT_EQ(mined.templates[0].pattern, "The [Nationality] delegation arrived.");
  EXPECT_EQ(mined.templates[0].source, TemplateSource::kCorpusMined);
  EXPECT_EQ(mined.templates[0].language, "en");
  EXPECT_TRUE(mined.multi_match.empty());
}

TEST(MineTest, MultiMatchReplacesFirstAndFlags) {
  const std::vector<std::string> sentences = {
      "An American met a Syrian and another American."};
  const std::vector<std::string> terms = {"Syrian", "American"};
  const auto mined = MineCorpusTemplates(sentences, terms);
  ASSERT_EQ(mined.templates.size(), 1u);
  EXPECT_EQ(mined.templates[0].pattern,
            "An [Nationality] met a Syrian and another American.");
  ASSERT_EQ(mined.multi_match.size(), 1u);
}

TEST(MineTest, LongestTermWinsAtSamePosition) {
  const std::vector<std::string> sentences = {"A South African poet."};
  const std::vector<std::string> terms = {"South", "South African"};
  const auto mined = MineCorpusTemplates(sentences, terms);
  ASSERT_EQ(mined.templates.size(), 1u);
  EXPECT_EQ(mined.templates[0].pattern, "A [Nationality] poet.");
  EXPECT_TRUE(mined.multi_match.empty());
}

TEST(MineTest, NoMatchAndDuplicates) {
  const std::vector<std::string> sentences = {
      "Nothing here.", "Syrians are not matched.", "The Syrian left.",
      "The German left.", "The [Adj] Syrian left."};
  const std::vector<std::string> terms = {"Syrian", "German"};
  const auto mined = MineCorpusTemplates(sentences, terms);
  ASSERT_EQ(mined.templates.size(), 1u);
  EXPECT_EQ(mined.templates[0].pattern, "The [Nationality] left.");
  EXPECT_EQ(mined.skipped, 1u);
  EXPECT_EQ(mined.templates[0].id.rfind("mined-", 0), 0u);
  EXPECT_THROW(MineCorpusTemplates(sentences, {}), Error);
}

}  // namespace
}  // namespace natbias
