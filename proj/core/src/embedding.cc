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

#include "natbias/embedding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include "natbias/error.h"
#include "natbias/random.h"
#include "natbias/text.h"

namespace natbias {
namespace {

using json = nlohmann::json;

constexpr std::string_view kGroupPlaceholder = "\x1f";

std::string Abbreviate(std::string_view text) {
  constexpr std::size_t kMax = 80;
  if (text.size() <= kMax) return std::string(text);
  return std::string(text.substr(0, kMax)) + "...";
}

void RequireFinite(const EmbeddingVector& v, std::string_view what) {
  for (const double x : v.values) {
    if (!std::isfinite(x)) {
      throw ValidationError("non-finite value in " + std::string(what));
    }
  }
}

}  // namespace

double Dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw ValidationError("dot product of vectors with different dimensions");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    sum += a.values[i] * b.values[i];
  }
  return sum;
}

std::vector<EmbeddingVector> Encoder::EncodeBatch(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(Encode(texts[i]));
    } catch (const Error& e) {
      throw e.WithContext("text #" + std::to_string(i) + " \"" +
                          Abbreviate(texts[i]) + "\"");
    }
  }
  return out;
}

// --- synthetic --------------------------------------------------------------

SyntheticEncoder::SyntheticEncoder(std::size_t dimension,
                                   std::string mask_token,
                                   SyntheticParams params)
    : Encoder(std::move(mask_token)),
      dimension_(dimension),
      params_(std::move(params)) {
  if (dimension_ < 2) {
    throw ValidationError("synthetic backend needs dimension >= 2");
  }
  if (params_.polarity_axis.empty()) {
    Rng rng(MixSeed(params_.axis_seed));
    axis_.resize(dimension_);
    for (double& x : axis_) x = rng.Normal();
  } else {
    if (params_.polarity_axis.size() != dimension_) {
      throw ValidationError("polarity axis length differs from dimension");
    }
    axis_ = params_.polarity_axis;
  }
  double norm = 0.0;
  for (const double x : axis_) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("polarity axis must be a finite non-zero vector");
  }
  for (double& x : axis_) x /= norm;
  for (const auto& [word, polarity] : params_.polarity_lexicon) {
    if (polarity < -1 || polarity > 1) {
      throw ValidationError("synthetic polarity for '" + word +
                            "' must be -1, 0 or +1");
    }
    if (IsSingleWord(word)) {
      word_polarity_.emplace(word, polarity);
    } else if (!word.empty()) {
      phrase_polarity_.emplace_back(word, polarity);
    }
  }
  for (const auto& [group, coefficient] : params_.bias_map) {
    if (group.empty() || !std::isfinite(coefficient)) {
      throw ValidationError("invalid bias_map entry");
    }
  }
}

double SyntheticEncoder::Polarity(std::string_view text) const {
  int sum = 0;
  int count = 0;
  std::unordered_set<std::string_view> seen;
  for (const std::string_view token : WordTokens(text)) {
    const auto it = word_polarity_.find(std::string(token));
    if (it != word_polarity_.end() && seen.insert(it->first).second) {
      sum += it->second;
      ++count;
    }
  }
  for (const auto& [phrase, polarity] : phrase_polarity_) {
    if (ContainsWord(text, phrase)) {
      sum += polarity;
      ++count;
    }
  }
  return count == 0 ? 0.0 : static_cast<double>(sum) / count;
}

double SyntheticEncoder::GroupBias(std::string_view text) const {
  double total = 0.0;
  for (const auto& [group, coefficient] : params_.bias_map) {
    if (ContainsWord(text, group)) total += coefficient;
  }
  return total;
}

EmbeddingVector SyntheticEncoder::Base(std::string_view text) const {
  std::vector<TextSpan> spans;
  auto collect = [&](std::string_view term) {
    const auto found = FindWordOccurrences(text, term);
    spans.insert(spans.end(), found.begin(), found.end());
  };
  for (const auto& entry : params_.bias_map) collect(entry.first);
  collect(mask_token());
  std::sort(spans.begin(), spans.end(), [](const TextSpan& a, const TextSpan& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
  });
  std::vector<TextSpan> disjoint;
  for (const TextSpan& span : spans) {
    if (disjoint.empty() || span.begin >= disjoint.back().end) {
      disjoint.push_back(span);
    }
  }
  const std::string canonical = ReplaceSpans(text, disjoint, kGroupPlaceholder);

  Rng rng(DeriveSeed(params_.seed, canonical));
  EmbeddingVector base;
  base.values.resize(dimension_);
  double along_axis = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    base.values[i] = rng.Normal();
    along_axis += base.values[i] * axis_[i];
  }
  for (std::size_t i = 0; i < dimension_; ++i) {
    base.values[i] -= along_axis * axis_[i];
  }
  return base;
}

EmbeddingVector SyntheticEncoder::Encode(std::string_view text) const {
  EmbeddingVector v = Base(text);
  const double coefficient = Polarity(text) + GroupBias(text);
  for (std::size_t i = 0; i < dimension_; ++i) {
    v.values[i] += coefficient * axis_[i];
  }
  return v;
}

EmbeddingVector SyntheticEncode(std::string_view text, std::size_t dimension,
                                std::string_view mask_token,
                                const SyntheticParams& params) {
  return SyntheticEncoder(dimension, std::string(mask_token), params)
      .Encode(text);
}

// --- file store ----------------------------------------------------------------

std::vector<StoreRecord> ReadEmbeddingStore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings store " + path.string());
  std::vector<StoreRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_number);
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) throw ValidationError("record is not an object");
      StoreRecord record;
      if (obj.contains("text")) record.text = obj.at("text").get<std::string>();
      if (obj.contains("key")) {
        record.key = obj.at("key").get<std::string>();
      } else if (obj.contains("text")) {
        record.key = ContentKey(record.text);
      } else {
        throw ValidationError("record has neither key nor text");
      }
      if (obj.contains("text") && ContentKey(record.text) != record.key) {
        throw ValidationError("key does not match SHA-256 of NFC text");
      }
      const json& vector = obj.at("vector");
      if (!vector.is_array() || vector.empty()) {
        throw ValidationError("'vector' must be a non-empty array");
      }
      record.vector.values = vector.get<std::vector<double>>();
      RequireFinite(record.vector, "vector");
      records.push_back(std::move(record));
    } catch (const Error& e) {
      throw e.WithContext(where);
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return records;
}

void WriteEmbeddingStore(const std::filesystem::path& path,
                         std::span<const StoreRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write embeddings store " + path.string());
  std::unordered_set<std::string> written;
  for (const StoreRecord& record : records) {
    const std::string key =
        record.key.empty() ? ContentKey(record.text) : record.key;
    if (!written.insert(key).second) continue;
    json obj = json::object();
    obj["key"] = key;
    obj["text"] = record.text;
    obj["vector"] = record.vector.values;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

FileEncoder::FileEncoder(const std::filesystem::path& path,
                         std::string mask_token, std::size_t dimension)
    : Encoder(std::move(mask_token)), dimension_(dimension) {
  const std::vector<StoreRecord> records = ReadEmbeddingStore(path);
  try {
    Index(records);
  } catch (const Error& e) {
    throw e.WithContext(path.string());
  }
}

FileEncoder::FileEncoder(std::span<const StoreRecord> records,
                         std::string mask_token, std::size_t dimension)
    : Encoder(std::move(mask_token)), dimension_(dimension) {
  Index(records);
}

void FileEncoder::Index(std::span<const StoreRecord> records) {
  for (const StoreRecord& record : records) {
    if (dimension_ == 0) dimension_ = record.vector.dimension();
    if (record.vector.dimension() != dimension_) {
      throw ValidationError("store vector of dimension " +
                            std::to_string(record.vector.dimension()) +
                            ", expected " + std::to_string(dimension_));
    }
    const std::string key =
        record.key.empty() ? ContentKey(record.text) : record.key;
    const auto [it, inserted] = store_.emplace(key, record.vector);
    if (!inserted && it->second != record.vector) {
      throw ValidationError("conflicting vectors for key " + key);
    }
  }
}

bool FileEncoder::Contains(std::string_view text) const {
  return store_.count(ContentKey(text)) != 0;
}

EmbeddingVector FileEncoder::Encode(std::string_view text) const {
  const auto it = store_.find(ContentKey(text));
  if (it == store_.end()) {
    throw MissingDataError("no stored embedding for \"" + Abbreviate(text) +
                           "\"");
  }
  return it->second;
}

std::vector<std::string> FileEncoder::Missing(
    std::span<const std::string> texts) const {
  std::vector<std::string> missing;
  std::unordered_set<std::string> seen;
  for (const std::string& text : texts) {
    const std::string key = ContentKey(text);
    if (store_.count(key) == 0 && seen.insert(key).second) {
      missing.push_back(text);
    }
  }
  return missing;
}

// --- factory --------------------------------------------------------------------

std::string_view ToString(BackendKind kind) {
  switch (kind) {
    case BackendKind::kFile:
      return "file";
    case BackendKind::kSynthetic:
      return "synthetic";
    case BackendKind::kExternal:
      return "external";
  }
  return "";
}

BackendKind ParseBackendKind(std::string_view text) {
  if (text == "file") return BackendKind::kFile;
  if (text == "synthetic") return BackendKind::kSynthetic;
  if (text == "external") return BackendKind::kExternal;
  throw ValidationError("unknown backend '" + std::string(text) + "'");
}

std::unique_ptr<Encoder> MakeEncoder(const BackendSpec& spec) {
  if (spec.mask_token.empty()) throw ValidationError("empty mask token");
  switch (spec.kind) {
    case BackendKind::kFile:
      if (spec.path.empty()) {
        throw ValidationError("file backend needs a store path");
      }
      return std::make_unique<FileEncoder>(spec.path, spec.mask_token,
                                           spec.dimension);
    case BackendKind::kSynthetic:
      return std::make_unique<SyntheticEncoder>(spec.dimension, spec.mask_token,
                                                spec.synthetic);
    case BackendKind::kExternal:
      if (spec.command.empty()) {
        throw ValidationError("external backend needs a command");
      }
      return std::make_unique<ExternalEncoder>(spec.command, spec.mask_token,
                                               spec.dimension);
  }
  throw ValidationError("unsupported backend");
}

}  // namespace natbias
