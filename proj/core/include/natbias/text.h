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

// UTF-8 text utilities shared by template mining, corpus extraction and the
// embedding/score stores: word-boundary term matching, sentence splitting,
// NFC normalization and content hashing.

#ifndef NATBIAS_TEXT_H_
#define NATBIAS_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace natbias {

// Byte range [begin, end) of a match inside a UTF-8 string.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

bool IsValidUtf8(std::string_view text);

// A word character is any Unicode letter, number or combining mark.
bool IsWordCodePoint(char32_t c);

// All non-overlapping occurrences of `term` in `text` that start and end on
// a word boundary, left to right. Case-insensitive mode compares simple
// case folds code point by code point.
std::vector<TextSpan> FindWordOccurrences(std::string_view text,
                                          std::string_view term,
                                          bool case_sensitive = true);

bool ContainsWord(std::string_view text, std::string_view term,
                  bool case_sensitive = true);

// Maximal runs of word characters, left to right, as views into `text`.
std::vector<std::string_view> WordTokens(std::string_view text);

// True for valid UTF-8 made only of word characters. Such a term occurs in
// a text exactly when it equals one of the text's WordTokens.
bool IsSingleWord(std::string_view term);

// Replaces every span (sorted, non-overlapping) with `replacement`.
std::string ReplaceSpans(std::string_view text,
                         const std::vector<TextSpan>& spans,
                         std::string_view replacement);

// Splits a document on [.!?] followed by whitespace and an uppercase letter,
// or by trailing whitespace up to the end of the document. Sentences are
// trimmed; empty pieces are dropped.
std::vector<std::string> SplitSentences(std::string_view document);

std::string_view Trim(std::string_view s);

// Canonical composition (NFC). Throws Error(kValidation) on invalid UTF-8.
std::string NormalizeNfc(std::string_view text);

std::string Sha256Hex(std::string_view bytes);

// Store key for a text: hex SHA-256 of its NFC form.
std::string ContentKey(std::string_view text);

}  // namespace natbias

#endif  // NATBIAS_TEXT_H_
