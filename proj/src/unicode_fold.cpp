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

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/utf16.h>

#include "offlang/common.hpp"
#include "offlang/normalize.hpp"

namespace offlang {
namespace {

// Letters from other scripts (and a few Latin letters without a canonical
// decomposition) that are used as drop-in replacements for Latin letters.
const std::unordered_map<char32_t, char32_t>& Confusables() {
  static const auto* table = new std::unordered_map<char32_t, char32_t>{
      // Greek capitals.
      {U'Α', U'A'}, {U'Β', U'B'}, {U'Ε', U'E'}, {U'Ζ', U'Z'}, {U'Η', U'H'},
      {U'Ι', U'I'}, {U'Κ', U'K'}, {U'Μ', U'M'}, {U'Ν', U'N'}, {U'Ο', U'O'},
      {U'Ρ', U'P'}, {U'Τ', U'T'}, {U'Υ', U'Y'}, {U'Χ', U'X'},
      // Greek small letters.
      {U'α', U'a'}, {U'β', U'b'}, {U'γ', U'y'}, {U'ε', U'e'}, {U'η', U'n'},
      {U'ι', U'i'}, {U'κ', U'k'}, {U'μ', U'u'}, {U'ν', U'v'}, {U'ο', U'o'},
      {U'ρ', U'p'}, {U'σ', U'o'}, {U'ς', U'c'}, {U'τ', U't'}, {U'υ', U'u'},
      {U'χ', U'x'}, {U'ω', U'w'},
      // Cyrillic capitals.
      {U'А', U'A'}, {U'В', U'B'}, {U'Е', U'E'}, {U'К', U'K'}, {U'М', U'M'},
      {U'Н', U'H'}, {U'О', U'O'}, {U'Р', U'P'}, {U'С', U'C'}, {U'Т', U'T'},
      {U'У', U'Y'}, {U'Х', U'X'}, {U'Ѕ', U'S'}, {U'І', U'I'}, {U'Ј', U'J'},
      // Cyrillic small letters.
      {U'а', U'a'}, {U'е', U'e'}, {U'о', U'o'}, {U'р', U'p'}, {U'с', U'c'},
      {U'у', U'y'}, {U'х', U'x'}, {U'ѕ', U's'}, {U'і', U'i'}, {U'ј', U'j'},
      {U'ԁ', U'd'}, {U'ԛ', U'q'}, {U'ԝ', U'w'}, {U'ӏ', U'l'}, {U'к', U'k'},
      {U'м', U'm'}, {U'т', U't'}, {U'в', U'b'}, {U'н', U'h'},
      // Latin letters with a stroke or no decomposition.
      {U'ł', U'l'}, {U'Ł', U'L'}, {U'ø', U'o'}, {U'Ø', U'O'}, {U'đ', U'd'},
      {U'Đ', U'D'}, {U'ħ', U'h'}, {U'Ħ', U'H'}, {U'ı', U'i'}, {U'ƒ', U'f'},
      {U'ŧ', U't'}, {U'Ŧ', U'T'}, {U'ɍ', U'r'}, {U'ƀ', U'b'}, {U'ɨ', U'i'},
  };
  return *table;
}

char32_t FoldConfusable(char32_t cp) {
  const auto& table = Confusables();
  if (auto it = table.find(cp); it != table.end()) return it->second;
  // A case variant of a table entry folds like its lowercase form, which
  // keeps folding stable under the later lowercasing step.
  const char32_t lower = static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
  if (lower != cp) {
    if (auto it = table.find(lower); it != table.end()) return it->second;
  }
  return cp;
}

const UNormalizer2* Nfkd() {
  static const UNormalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* n = unorm2_getNFKDInstance(&status);
    if (U_FAILURE(status)) {
      throw std::runtime_error("ICU NFKD normalizer unavailable");
    }
    return n;
  }();
  return instance;
}

bool IsMark(UChar32 c) {
  const auto mask = U_GET_GC_MASK(c);
  return (mask & U_GC_M_MASK) != 0;
}

}  // namespace

std::u32string FoldCodePoint(char32_t cp) {
  const UChar32 c = static_cast<UChar32>(cp);
  if (u_isUWhiteSpace(c)) return U" ";
  const auto type = u_charType(c);
  if (type == U_CONTROL_CHAR || type == U_FORMAT_CHAR) return U"";

  UChar buffer[32];
  UErrorCode status = U_ZERO_ERROR;
  const int32_t length =
      unorm2_getDecomposition(Nfkd(), c, buffer, 32, &status);
  std::u32string out;
  auto emit = [&](UChar32 d) {
    if (IsMark(d)) return;
    if (u_isUWhiteSpace(d)) {
      out.push_back(U' ');
      return;
    }
    const auto t = u_charType(d);
    if (t == U_CONTROL_CHAR || t == U_FORMAT_CHAR) return;
    out.push_back(FoldConfusable(static_cast<char32_t>(d)));
  };
  if (U_FAILURE(status) || length < 0) {
    emit(c);
  } else {
    int32_t i = 0;
    while (i < length) {
      UChar32 d;
      U16_NEXT(buffer, i, length, d);
      emit(d);
    }
  }
  return out;
}

std::string LowercaseUtf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : DecodeUtf8(text)) {
    out += EncodeUtf8(
        static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp))));
  }
  return out;
}

}  // namespace offlang
