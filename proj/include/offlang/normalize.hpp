/*
 * Copyright (C) 2026 The offlang Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Canonicalization of adversarially spelled text.
//
// NormalizeText runs a fixed pipeline over whitespace-delimited tokens:
//
//   1. @mentions become the <USER> token
//   2. links are dropped
//   3. compatibility decomposition, diacritic stripping and confusable folding
//   4. leetspeak digits/symbols mapped to letters (only inside tokens that
//      already contain a letter)
//   5. character runs longer than two are squeezed to two
//   6. spelling-variant dictionary lookup (longest multi-token match)
//   7. lowercasing
//   8. whitespace collapse
//
// Mention and link detection look at the folded form of a token so that
// full-width or homoglyph disguises of '@' and "www." are still caught.

#ifndef OFFLANG_NORMALIZE_HPP_
#define OFFLANG_NORMALIZE_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace offlang {

inline constexpr std::string_view kUserToken = "<USER>";

// Code point substitutions for leetspeak.
struct LeetMap {
  std::map<char32_t, char32_t> table;

  // 1→i 3→e 4→a 5→s 0→o @→a $→s !→i
  static LeetMap Default();
};

// Lines of `from<TAB>to`, one code point each side; '#' starts a comment.
LeetMap LoadLeetMap(std::istream& in);
void WriteLeetMap(std::ostream& out, const LeetMap& map);

// Raw variant → canonical pairs as written in the dictionary file. Keys are
// case-insensitive; a key may span several space-separated tokens.
class VariantDictionary {
 public:
  VariantDictionary() = default;

  // Lines of `variant<TAB>canonical`; '#' starts a comment.
  static VariantDictionary Load(std::istream& in);
  static VariantDictionary LoadFile(const std::string& path);
  void Write(std::ostream& out) const;

  // Throws ValidationError when the variant already maps elsewhere.
  void Add(std::string_view variant, std::string_view canonical);

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
};

struct TraceEdit {
  // Byte range of the raw text the edit came from.
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string rule;
  std::string before;
  std::string after;
};

struct NormalizedDocument {
  std::string original;
  std::string normalized;
  std::vector<std::string> tokens;
  std::vector<TraceEdit> trace;
};

// A compiled normalizer: dictionary keys are folded with the same steps 3–5
// and 7 that are applied to text, so lookups happen in folded space.
// Immutable after construction.
class Normalizer {
 public:
  Normalizer();
  explicit Normalizer(const VariantDictionary& dict,
                      LeetMap leet = LeetMap::Default());

  NormalizedDocument Normalize(std::string_view raw) const;

  // Steps 3–5 on a single token. Idempotent.
  std::string Fold(std::string_view token) const;

  // Number of compiled (folded) dictionary keys.
  std::size_t dictionary_size() const { return keys_.size(); }
  const VariantDictionary& dictionary() const { return dict_; }
  const LeetMap& leet() const { return leet_; }

 private:
  std::string Leet(std::string_view token) const;

  VariantDictionary dict_;
  LeetMap leet_;
  std::map<std::vector<std::string>, std::string> keys_;
  std::size_t max_key_tokens_ = 0;
};

NormalizedDocument NormalizeText(std::string_view raw,
                                 const VariantDictionary& dict);
std::string FoldObfuscation(std::string_view token);

// Splits normalized text on single spaces, dropping empty pieces.
std::vector<std::string> Tokenize(std::string_view normalized);

// Whitespace split with no other processing; the unnormalized baseline.
std::vector<std::string> SplitWhitespace(std::string_view raw);

// Token with leading and trailing ASCII punctuation removed, lowercased.
// <USER> is returned unchanged. Used as the matching key by the variant
// dictionary and the lexicon.
std::string TokenCore(std::string_view token);

// Lowercases code point by code point (simple case mapping).
std::string LowercaseUtf8(std::string_view text);

// Compatibility decomposition, mark stripping, format-character removal and
// homoglyph folding for one code point. Whitespace controls become ' '.
std::u32string FoldCodePoint(char32_t cp);

}  // namespace offlang

#endif  // OFFLANG_NORMALIZE_HPP_
