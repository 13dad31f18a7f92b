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

#include "natbias/text.h"

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <array>
#include <cstdint>
#include <memory>

#include "natbias/error.h"

namespace natbias {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset of the first code unit
};

// Decodes `text`; invalid sequences decode to U+FFFD.
std::vector<CodePoint> Decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(start)});
  }
  return out;
}

char32_t Fold(char32_t c, bool case_sensitive) {
  if (case_sensitive) return c;
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c),
                                          U_FOLD_CASE_DEFAULT));
}

bool IsSpace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

}  // namespace

bool IsValidUtf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

bool IsWordCodePoint(char32_t c) {
  const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & (U_GC_L_MASK | U_GC_N_MASK | U_GC_M_MASK)) != 0;
}

std::vector<std::string_view> WordTokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  const std::vector<CodePoint> cps = Decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!IsWordCodePoint(cps[i].value)) {
      ++i;
      continue;
    }
    const std::size_t begin = cps[i].offset;
    while (i < cps.size() && IsWordCodePoint(cps[i].value)) ++i;
    const std::size_t end = i == cps.size() ? text.size() : cps[i].offset;
    tokens.push_back(text.substr(begin, end - begin));
  }
  return tokens;
}

bool IsSingleWord(std::string_view term) {
  if (term.empty() || !IsValidUtf8(term)) return false;
  for (const CodePoint& cp : Decode(term)) {
    if (!IsWordCodePoint(cp.value)) return false;
  }
  return true;
}

std::vector<TextSpan> FindWordOccurrences(std::string_view text,
                                          std::string_view term,
                                          bool case_sensitive) {
  std::vector<TextSpan> spans;
  if (term.empty()) return spans;
  const std::vector<CodePoint> hay = Decode(text);
  std::vector<char32_t> needle;
  for (const CodePoint& cp : Decode(term)) {
    needle.push_back(Fold(cp.value, case_sensitive));
  }
  const std::size_t n = hay.size();
  const std::size_t m = needle.size();
  std::size_t i = 0;
  while (i + m <= n) {
    bool equal = true;
    for (std::size_t k = 0; k < m; ++k) {
      if (Fold(hay[i + k].value, case_sensitive) != needle[k]) {
        equal = false;
        break;
      }
    }
    const bool left_ok = i == 0 || !IsWordCodePoint(hay[i - 1].value);
    const bool right_ok = i + m == n || !IsWordCodePoint(hay[i + m].value);
    if (equal && left_ok && right_ok) {
      const std::size_t end = i + m == n ? text.size() : hay[i + m].offset;
      spans.push_back({hay[i].offset, end});
      i += m;
    } else {
      ++i;
    }
  }
  return spans;
}

bool ContainsWord(std::string_view text, std::string_view term,
                  bool case_sensitive) {
  return !FindWordOccurrences(text, term, case_sensitive).empty();
}

std::string ReplaceSpans(std::string_view text,
                         const std::vector<TextSpan>& spans,
                         std::string_view replacement) {
  std::string out;
  out.reserve(text.size() + spans.size() * replacement.size());
  std::size_t cursor = 0;
  for (const TextSpan& span : spans) {
    out.append(text.substr(cursor, span.begin - cursor));
    out.append(replacement);
    cursor = span.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string_view Trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitSentences(std::string_view document) {
  std::vector<std::string> sentences;
  const std::vector<CodePoint> cps = Decode(document);
  const std::size_t n = cps.size();
  std::size_t start = 0;  // byte offset of the current sentence
  auto emit = [&](std::size_t end) {
    const std::string_view piece =
        Trim(document.substr(start, end - start));
    if (!piece.empty()) sentences.emplace_back(piece);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = cps[i].value;
    if (c != U'.' && c != U'!' && c != U'?') continue;
    std::size_t j = i + 1;
    while (j < n && IsSpace(cps[j].value)) ++j;
    if (j == i + 1 && j < n) continue;  // no whitespace after punctuation
    const bool at_end = j == n;
    if (!at_end && !u_isupper(static_cast<UChar32>(cps[j].value))) continue;
    const std::size_t end = i + 1 < n ? cps[i + 1].offset : document.size();
    emit(end);
    start = end;
    i = j - 1;
  }
  if (start < document.size()) emit(document.size());
  return sentences;
}

std::string NormalizeNfc(std::string_view text) {
  if (!IsValidUtf8(text)) {
    throw ValidationError("text is not valid UTF-8");
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kIo, "ICU NFC normalizer unavailable");
  }
  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (nfc->isNormalized(source, status) && U_SUCCESS(status)) {
    return std::string(text);
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) {
    throw ValidationError("NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int digest_length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &digest_length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * digest_length);
  for (unsigned int i = 0; i < digest_length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string ContentKey(std::string_view text) {
  return Sha256Hex(NormalizeNfc(text));
}

}  // namespace natbias
