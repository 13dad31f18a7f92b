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

// Sentence embeddings behind one contract: a sentence maps to the mean of
// the language model's output token embeddings (every position, special
// tokens included). Three backends provide it:
//
//   FileEncoder       reads a JSONL store written by an extraction job
//   SyntheticEncoder  analytic stand-in with a known polarity axis and
//                     injected per-group bias, used for end-to-end checks
//   ExternalEncoder   talks line-delimited JSON to a child process
//
// Encoders are immutable after construction and safe to share across
// threads; the external backend serializes its transport internally.

#ifndef NATBIAS_EMBEDDING_H_
#define NATBIAS_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace natbias {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) =
      default;
};

double Dot(const EmbeddingVector& a, const EmbeddingVector& b);

class Encoder {
 public:
  explicit Encoder(std::string mask_token) : mask_token_(std::move(mask_token)) {}
  virtual ~Encoder() = default;

  Encoder(const Encoder&) = delete;
  Encoder& operator=(const Encoder&) = delete;

  virtual EmbeddingVector Encode(std::string_view text) const = 0;

  // Elementwise Encode, order preserved. The first failure is rethrown with
  // the index and text that caused it.
  virtual std::vector<EmbeddingVector> EncodeBatch(
      std::span<const std::string> texts) const;

  virtual std::size_t dimension() const = 0;

  // Model-specific token substituted for the nationality in baselines.
  const std::string& mask_token() const { return mask_token_; }

 private:
  std::string mask_token_;
};

// ---------------------------------------------------------------------------
// Synthetic backend

struct SyntheticParams {
  uint64_t seed = 0;
  // Unit direction of sentiment. Empty means derive it from `axis_seed`.
  std::vector<double> polarity_axis;
  uint64_t axis_seed = 0;
  // Group surface -> coefficient along the polarity axis.
  std::map<std::string, double> bias_map;
  // Word surface -> polarity in {-1, 0, +1}.
  std::map<std::string, int> polarity_lexicon;
};

// Builds
//
//   v = base(text) + (polarity(text) + sum of bias_map[g] for groups g in
//       text) * axis
//
// base is a seeded, hash-derived standard normal vector projected onto the
// complement of the axis. It is computed after every bias_map group and the
// mask token are replaced by one placeholder, so a probe variant and its
// baseline share their base and differ exactly by the group coefficient
// along the axis. polarity(text) is the mean polarity of the distinct
// lexicon words present (0 when none are). Terms match on word boundaries.
class SyntheticEncoder final : public Encoder {
 public:
  SyntheticEncoder(std::size_t dimension, std::string mask_token,
                   SyntheticParams params);

  EmbeddingVector Encode(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }

  const std::vector<double>& polarity_axis() const { return axis_; }
  double Polarity(std::string_view text) const;
  double GroupBias(std::string_view text) const;
  EmbeddingVector Base(std::string_view text) const;

 private:
  std::size_t dimension_;
  SyntheticParams params_;
  std::vector<double> axis_;
  // polarity_lexicon split into single words (token lookup) and phrases.
  std::unordered_map<std::string, int> word_polarity_;
  std::vector<std::pair<std::string, int>> phrase_polarity_;
};

// One-shot form of SyntheticEncoder::Encode.
EmbeddingVector SyntheticEncode(std::string_view text, std::size_t dimension,
                                std::string_view mask_token,
                                const SyntheticParams& params);

// ---------------------------------------------------------------------------
// File backend

// One line of the embeddings store:
//   {"key": <hex sha256 of NFC text>, "text": <string>, "vector": [double...]}
struct StoreRecord {
  std::string key;
  std::string text;
  EmbeddingVector vector;
};

std::vector<StoreRecord> ReadEmbeddingStore(const std::filesystem::path& path);

// Writes one record per distinct key, in first-seen order. Doubles are
// written in shortest round-trip form so a reload is bit-identical.
void WriteEmbeddingStore(const std::filesystem::path& path,
                         std::span<const StoreRecord> records);

class FileEncoder final : public Encoder {
 public:
  // `dimension` 0 takes the dimension from the store; an empty store then
  // reports 0 and every Encode is a miss.
  FileEncoder(const std::filesystem::path& path, std::string mask_token,
              std::size_t dimension = 0);
  FileEncoder(std::span<const StoreRecord> records, std::string mask_token,
              std::size_t dimension = 0);

  EmbeddingVector Encode(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }

  bool Contains(std::string_view text) const;
  // Distinct texts without a stored vector, in first-seen order.
  std::vector<std::string> Missing(std::span<const std::string> texts) const;
  std::size_t size() const { return store_.size(); }

 private:
  void Index(std::span<const StoreRecord> records);

  std::size_t dimension_;
  std::unordered_map<std::string, EmbeddingVector> store_;
};

// ---------------------------------------------------------------------------
// External backend

// Spawns `argv` and exchanges one JSON object per line over its
// stdin/stdout: request {"id": n, "text": s}, response {"id": n,
// "vector": [...]}. A dead child, a malformed reply or an id mismatch is an
// Error(kTransport).
class ExternalEncoder final : public Encoder {
 public:
  ExternalEncoder(std::vector<std::string> argv, std::string mask_token,
                  std::size_t dimension = 0);
  ~ExternalEncoder() override;

  EmbeddingVector Encode(std::string_view text) const override;
  std::size_t dimension() const override;

 private:
  void Shutdown();

  std::vector<std::string> argv_;
  mutable std::mutex mutex_;
  mutable std::size_t dimension_;
  mutable uint64_t next_id_ = 0;
  mutable std::string read_buffer_;
  int fd_ = -1;
  int pid_ = -1;
};

// ---------------------------------------------------------------------------

enum class BackendKind { kFile, kSynthetic, kExternal };

std::string_view ToString(BackendKind kind);
BackendKind ParseBackendKind(std::string_view text);

struct BackendSpec {
  BackendKind kind = BackendKind::kSynthetic;
  std::size_t dimension = 0;
  std::string mask_token = "[MASK]";
  std::filesystem::path path;        // file backend
  std::vector<std::string> command;  // external backend
  SyntheticParams synthetic;         // synthetic backend
};

std::unique_ptr<Encoder> MakeEncoder(const BackendSpec& spec);

}  // namespace natbias

#endif  // NATBIAS_EMBEDDING_H_
