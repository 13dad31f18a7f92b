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

#include <gtest/gtest.h>

#include <thread>
#include <vector>

#include "natbias/embedding.h"
#include "natbias/error.h"

namespace natbias {
namespace {

ExternalEncoder Spawn() { return ExternalEncoder({NATBIAS_FAKE_EMBEDDER}, "[MASK]"); }

ErrorKind KindOf(const ExternalEncoder& enc, std::string_view text) {
  try {
    enc.Encode(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::kValidation;
}

TEST(ExternalEncoderTest, RequestResponse) {
  const ExternalEncoder enc = Spawn();
  const EmbeddingVector v = enc.Encode("banana");
  ASSERT_EQ(v.dimension(), 3u);
  EXPECT_EQ(v.values[0], 6.0);
  EXPECT_EQ(v.values[2], 3.0);
  EXPECT_EQ(enc.dimension(), 3u);
  const EmbeddingVector w = enc.Encode("banana");
  EXPECT_EQ(w.values[1], v.values[1] + 1);  // ids increase per request
}

TEST(ExternalEncoderTest, ConcurrentCallersAreSerialized) {
  const ExternalEncoder enc = Spawn();
  std::vector<std::thread> threads;
  std::vector<int> ok(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        const std::string text(static_cast<std::size_t>(t + 1), 'a');
        const EmbeddingVector v = enc.Encode(text);
        ok[t] += v.values[0] == t + 1 && v.values[2] == t + 1;
      }
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 0; t < 8; ++t) EXPECT_EQ(ok[t], 25);
}

TEST(ExternalEncoderTest, TransportFailures) {
  {
    const ExternalEncoder enc = Spawn();
    EXPECT_EQ(KindOf(enc, "BADJSON"), ErrorKind::kTransport);
  }
  {
    const ExternalEncoder enc = Spawn();
    EXPECT_EQ(KindOf(enc, "WRONGID"), ErrorKind::kTransport);
  }
  {
    const ExternalEncoder enc = Spawn();
    EXPECT_EQ(KindOf(enc, "CRASH now"), ErrorKind::kTransport);
    EXPECT_EQ(KindOf(enc, "after the crash"), ErrorKind::kTransport);
  }
  {
    const ExternalEncoder enc({"/nonexistent/embedder"}, "[MASK]");
    EXPECT_EQ(KindOf(enc, "x"), ErrorKind::kTransport);
  }
}

TEST(ExternalEncoderTest, DimensionMismatch) {
  const ExternalEncoder enc({NATBIAS_FAKE_EMBEDDER}, "[MASK]", 5);
  EXPECT_THROW(enc.Encode("abc"), Error);
}

}  // namespace
}  // namespace natbias
