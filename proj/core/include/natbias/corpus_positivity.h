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

// Context positivity of nationality mentions in a text corpus.
//
// Sentences mentioning a term are collected, the term is replaced by the
// mask token so the scorer cannot react to the nationality itself, and the
// positive-sentiment probabilities are averaged per term.

#ifndef NATBIAS_CORPUS_POSITIVITY_H_
#define NATBIAS_CORPUS_POSITIVITY_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "natbias/bias_pipeline.h"
#include "natbias/classifier.h"
#include "natbias/embedding.h"
#include "natbias/stats.h"

namespace natbias {

enum class DocumentLayout {
  kLinePerDocument,     // every line is a document
  kBlankLineSeparated,  // documents span lines up to a blank line
};

struct ExtractOptions {
  DocumentLayout layout = DocumentLayout::kLinePerDocument;
  bool case_sensitive = true;
};

struct ExtractedSentences {
  // Term -> sentences containing it on a word boundary, in corpus order. A
  // sentence mentioning several terms is listed under each.
  std::map<std::string, std::vector<std::string>> by_term;
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t skipped_chunks = 0;  // documents that were not valid UTF-8
};

// Single-pass streaming extractor. Feed lines, then call Finish().
class SentenceExtractor {
 public:
  SentenceExtractor(std::span<const std::string> terms, ExtractOptions options);

  void AddLine(std::string_view line);
  ExtractedSentences Finish();

 private:
  void FlushDocument();

  std::vector<std::string> terms_;
  ExtractOptions options_;
  std::string pending_;
  bool has_pending_ = false;
  ExtractedSentences result_;
};

ExtractedSentences ExtractSentences(std::istream& corpus,
                                    std::span<const std::string> terms,
                                    const ExtractOptions& options = {});

// Plain text or gzip, detected from the stream.
ExtractedSentences ExtractSentencesFromFiles(
    std::span<const std::filesystem::path> paths,
    std::span<const std::string> terms, const ExtractOptions& options = {});

// Replaces every word-boundary occurrence of `term`. Throws Error
// (kValidation) when the term does not occur.
std::string MaskMentions(std::string_view sentence, std::string_view term,
                         std::string_view mask_token,
                         bool case_sensitive = true);

// Maps a sentence to a positive-sentiment probability in [0, 1].
class SentenceScorer {
 public:
  virtual ~SentenceScorer() = default;
  virtual double ScoreSentence(std::string_view sentence) const = 0;
};

// JSONL records {key: sha256(NFC masked sentence), score: float}.
class ScoreStore final : public SentenceScorer {
 public:
  explicit ScoreStore(const std::filesystem::path& path);
  explicit ScoreStore(std::unordered_map<std::string, double> by_key);

  double ScoreSentence(std::string_view sentence) const override;
  bool Contains(std::string_view sentence) const;
  std::size_t size() const { return by_key_.size(); }

 private:
  std::unordered_map<std::string, double> by_key_;
};

void WriteScoreStore(const std::filesystem::path& path,
                     std::span<const std::pair<std::string, double>> scored);

// Reuses a trained sentiment head as the scorer.
class ClassifierScorer final : public SentenceScorer {
 public:
  ClassifierScorer(const SentimentModel& model, const Encoder& encoder)
      : model_(model), encoder_(encoder) {}
  double ScoreSentence(std::string_view sentence) const override;

 private:
  const SentimentModel& model_;
  const Encoder& encoder_;
};

struct CorpusStats {
  std::string nationality;
  std::optional<double> context_positivity;  // empty when n_sentences == 0
  std::size_t n_sentences = 0;
};

// Sentences that mention the nationality are masked before scoring; the
// rest are taken as already masked.
CorpusStats ContextPositivity(std::string_view nationality,
                              std::span<const std::string> sentences,
                              const SentenceScorer& scorer,
                              std::string_view mask_token,
                              bool case_sensitive = true);

struct CorrelationReport {
  stats::PearsonResult pearson;
  std::vector<std::string> aligned;
  std::vector<std::string> only_in_corpus;   // no matching result
  std::vector<std::string> only_in_results;  // no corpus positivity
};

// Pearson r between context positivity and relative sentiment over the
// nationalities present on both sides. Needs at least three.
CorrelationReport Correlate(std::span<const CorpusStats> corpus_stats,
                            std::span<const NationalityResult> results);

}  // namespace natbias

#endif  // NATBIAS_CORPUS_POSITIVITY_H_
