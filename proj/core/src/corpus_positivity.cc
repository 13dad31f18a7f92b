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

#include "natbias/corpus_positivity.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>
#include "natbias/error.h"
#include "natbias/text.h"

namespace natbias {
namespace {

using json = nlohmann::json;

// Reads lines from a plain or gzip-compressed file; zlib passes plain
// input through unchanged.
class GzLineReader {
 public:
  explicit GzLineReader(const std::filesystem::path& path)
      : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw IoError("cannot open corpus " + path.string());
  }
  ~GzLineReader() { gzclose(file_); }
  GzLineReader(const GzLineReader&) = delete;
  GzLineReader& operator=(const GzLineReader&) = delete;

  bool Next(std::string& line) {
    line.clear();
    char chunk[8192];
    while (gzgets(file_, chunk, sizeof(chunk)) != nullptr) {
      line.append(chunk);
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
    int error = Z_OK;
    const char* message = gzerror(file_, &error);
    if (error != Z_OK && error != Z_STREAM_END) {
      throw IoError(std::string("corpus read error: ") + message);
    }
    return !line.empty();
  }

 private:
  gzFile file_;
};

}  // namespace

SentenceExtractor::SentenceExtractor(std::span<const std::string> terms,
                                     ExtractOptions options)
    : terms_(terms.begin(), terms.end()), options_(options) {
  if (terms_.empty()) throw ValidationError("no terms to extract");
  for (const std::string& term : terms_) {
    if (term.empty()) throw ValidationError("empty extraction term");
    result_.by_term[term];
  }
}

void SentenceExtractor::AddLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (options_.layout == DocumentLayout::kLinePerDocument) {
    pending_.assign(line);
    has_pending_ = true;
    FlushDocument();
    return;
  }
  if (Trim(line).empty()) {
    FlushDocument();
    return;
  }
  if (has_pending_) pending_.push_back(' ');
  pending_.append(line);
  has_pending_ = true;
}

void SentenceExtractor::FlushDocument() {
  if (!has_pending_) return;
  has_pending_ = false;
  if (Trim(pending_).empty()) {
    pending_.clear();
    return;
  }
  ++result_.documents;
  if (!IsValidUtf8(pending_)) {
    ++result_.skipped_chunks;
    pending_.clear();
    return;
  }
  for (std::string& sentence : SplitSentences(pending_)) {
    ++result_.sentences;
    for (const std::string& term : terms_) {
      if (ContainsWord(sentence, term, options_.case_sensitive)) {
        result_.by_term[term].push_back(sentence);
      }
    }
  }
  pending_.clear();
}

ExtractedSentences SentenceExtractor::Finish() {
  FlushDocument();
  return std::move(result_);
}

ExtractedSentences ExtractSentences(std::istream& corpus,
                                    std::span<const std::string> terms,
                                    const ExtractOptions& options) {
  SentenceExtractor extractor(terms, options);
  std::string line;
  while (std::getline(corpus, line)) extractor.AddLine(line);
  return extractor.Finish();
}

ExtractedSentences ExtractSentencesFromFiles(
    std::span<const std::filesystem::path> paths,
    std::span<const std::string> terms, const ExtractOptions& options) {
  SentenceExtractor extractor(terms, options);
  std::string line;
  for (const std::filesystem::path& path : paths) {
    GzLineReader reader(path);
    while (reader.Next(line)) extractor.AddLine(line);
    // Documents never continue across files.
    extractor.AddLine("");
  }
  return extractor.Finish();
}

std::string MaskMentions(std::string_view sentence, std::string_view term,
                         std::string_view mask_token, bool case_sensitive) {
  const std::vector<TextSpan> spans =
      FindWordOccurrences(sentence, term, case_sensitive);
  if (spans.empty()) {
    throw ValidationError("term '" + std::string(term) +
                          "' does not occur in sentence");
  }
  return ReplaceSpans(sentence, spans, mask_token);
}

ScoreStore::ScoreStore(std::unordered_map<std::string, double> by_key)
    : by_key_(std::move(by_key)) {
  for (const auto& [key, score] : by_key_) {
    if (!(score >= 0.0 && score <= 1.0)) {
      throw ValidationError("score for " + key + " outside [0, 1]");
    }
  }
}

ScoreStore::ScoreStore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open score store " + path.string());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_number);
    try {
      const json obj = json::parse(line);
      std::string key;
      if (obj.contains("key")) {
        key = obj.at("key").get<std::string>();
      } else {
        key = ContentKey(obj.at("text").get<std::string>());
      }
      const double score = obj.at("score").get<double>();
      if (!(score >= 0.0 && score <= 1.0)) {
        throw ValidationError("score outside [0, 1]");
      }
      by_key_[key] = score;
    } catch (const Error& e) {
      throw e.WithContext(where);
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
}

double ScoreStore::ScoreSentence(std::string_view sentence) const {
  const auto it = by_key_.find(ContentKey(sentence));
  if (it == by_key_.end()) {
    throw MissingDataError("no stored score for \"" + std::string(sentence) +
                           "\"");
  }
  return it->second;
}

bool ScoreStore::Contains(std::string_view sentence) const {
  return by_key_.count(ContentKey(sentence)) != 0;
}

void WriteScoreStore(const std::filesystem::path& path,
                     std::span<const std::pair<std::string, double>> scored) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write score store " + path.string());
  std::set<std::string> written;
  for (const auto& [text, score] : scored) {
    const std::string key = ContentKey(text);
    if (!written.insert(key).second) continue;
    json obj = json::object();
    obj["key"] = key;
    obj["score"] = score;
    out << obj.dump() << '\n';
  }
}

double ClassifierScorer::ScoreSentence(std::string_view sentence) const {
  return Score(model_, encoder_.Encode(sentence));
}

CorpusStats ContextPositivity(std::string_view nationality,
                              std::span<const std::string> sentences,
                              const SentenceScorer& scorer,
                              std::string_view mask_token,
                              bool case_sensitive) {
  CorpusStats stats;
  stats.nationality = std::string(nationality);
  stats.n_sentences = sentences.size();
  if (sentences.empty()) return stats;
  double sum = 0.0;
  for (const std::string& sentence : sentences) {
    const std::string masked =
        ContainsWord(sentence, nationality, case_sensitive)
            ? MaskMentions(sentence, nationality, mask_token, case_sensitive)
            : sentence;
    const double score = scorer.ScoreSentence(masked);
    if (!(score >= 0.0 && score <= 1.0)) {
      throw ValidationError("scorer returned a value outside [0, 1]");
    }
    sum += score;
  }
  stats.context_positivity = sum / static_cast<double>(sentences.size());
  return stats;
}

CorrelationReport Correlate(std::span<const CorpusStats> corpus_stats,
                            std::span<const NationalityResult> results) {
  std::map<std::string, double> positivity;
  for (const CorpusStats& s : corpus_stats) {
    if (s.context_positivity) positivity[s.nationality] = *s.context_positivity;
  }
  std::map<std::string, double> sentiment;
  for (const NationalityResult& r : results) {
    sentiment[r.nationality] = r.relative_sentiment;
  }

  CorrelationReport report;
  std::vector<double> x;
  std::vector<double> y;
  for (const CorpusStats& s : corpus_stats) {
    if (!s.context_positivity) continue;
    const auto it = sentiment.find(s.nationality);
    if (it == sentiment.end()) {
      report.only_in_corpus.push_back(s.nationality);
      continue;
    }
    report.aligned.push_back(s.nationality);
    x.push_back(*s.context_positivity);
    y.push_back(it->second);
  }
  for (const NationalityResult& r : results) {
    if (positivity.count(r.nationality) == 0) {
      report.only_in_results.push_back(r.nationality);
    }
  }
  if (report.aligned.size() < 3) {
    throw ValidationError("correlation needs at least 3 aligned nationalities, got " +
                          std::to_string(report.aligned.size()));
  }
  report.pearson = stats::Pearson(x, y);
  return report;
}

}  // namespace natbias
