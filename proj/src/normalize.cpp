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

#include "offlang/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <unicode/uchar.h>

#include "offlang/common.hpp"

namespace offlang {
namespace {

bool IsAsciiPunct(char32_t c) {
  return c < 0x80 && ((c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
                      (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E));
}

bool IsWordChar(char32_t c) {
  return c == U'_' || u_isalnum(static_cast<UChar32>(c));
}

bool IsLetter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
bool IsDigit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

char32_t Lower(char32_t c) {
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

std::u32string FoldChars(std::u32string_view token) {
  std::u32string out;
  out.reserve(token.size());
  for (char32_t cp : token) out += FoldCodePoint(cp);
  return out;
}

std::u32string Squeeze(std::u32string_view token) {
  std::u32string out;
  out.reserve(token.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (i > 0 && Lower(token[i]) == Lower(token[i - 1])) {
      ++run;
    } else {
      run = 1;
    }
    if (run <= 2) out.push_back(token[i]);
  }
  return out;
}

std::vector<std::u32string> SplitOnSpaces(const std::u32string& s) {
  std::vector<std::u32string> pieces;
  std::u32string current;
  for (char32_t c : s) {
    if (c == U' ') {
      if (!current.empty()) pieces.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) pieces.push_back(std::move(current));
  return pieces;
}

bool IsUrl(const std::u32string& piece) {
  std::size_t i = 0;
  while (i < piece.size() && IsAsciiPunct(piece[i])) ++i;
  std::string lower;
  for (std::size_t k = i; k < piece.size(); ++k) {
    lower += EncodeUtf8(Lower(piece[k]));
  }
  return lower.rfind("www.", 0) == 0 ||
         lower.find("://") != std::string::npos;
}

// Splits a folded piece around leading @mentions. Returns false when the
// piece holds no mention.
bool SplitMentions(const std::u32string& piece,
                   std::vector<std::u32string>& out) {
  std::u32string rest = piece;
  bool found = false;
  for (;;) {
    std::size_t i = 0;
    while (i < rest.size() && rest[i] != U'@' && IsAsciiPunct(rest[i])) ++i;
    if (i + 1 >= rest.size() || rest[i] != U'@' || !IsWordChar(rest[i + 1])) {
      break;
    }
    std::size_t j = i + 1;
    while (j < rest.size() && IsWordChar(rest[j])) ++j;
    if (i > 0) out.push_back(rest.substr(0, i));
    out.push_back(DecodeUtf8(kUserToken));
    rest = rest.substr(j);
    found = true;
  }
  if (found && !rest.empty()) out.push_back(rest);
  return found;
}

struct WorkToken {
  std::string text;
  std::size_t begin;
  std::size_t end;
};

struct EdgePunct {
  std::size_t lead = 0;
  std::size_t trail = 0;
  std::string core;  // lowercased
};

EdgePunct SplitEdges(std::string_view token) {
  EdgePunct e;
  if (token == kUserToken) {
    e.core = std::string(token);
    return e;
  }
  std::size_t b = 0;
  std::size_t end = token.size();
  while (b < end && IsAsciiPunct(static_cast<unsigned char>(token[b]))) ++b;
  while (end > b &&
         IsAsciiPunct(static_cast<unsigned char>(token[end - 1]))) {
    --end;
  }
  e.lead = b;
  e.trail = token.size() - end;
  e.core = LowercaseUtf8(token.substr(b, end - b));
  return e;
}

struct DictMatch {
  std::size_t length;
  const std::string* canonical;
};

// Longest key starting at `start`. In a multi-token match the first token may
// carry only leading punctuation, the last only trailing, and interior tokens
// none.
std::optional<DictMatch> LongestDictMatch(
    const std::map<std::vector<std::string>, std::string>& keys,
    std::size_t max_tokens, const std::vector<EdgePunct>& edges,
    std::size_t start) {
  const std::size_t limit = std::min(max_tokens, edges.size() - start);
  std::vector<std::string> key;
  std::optional<DictMatch> best;
  for (std::size_t len = 1; len <= limit; ++len) {
    const std::size_t pos = start + len - 1;
    if (edges[pos].core.empty() || edges[pos].core == kUserToken) break;
    if (len > 1 && edges[pos - 1].trail != 0) break;
    key.push_back(edges[pos].core);
    const bool closes = len == 1 || edges[pos].lead == 0;
    if (auto it = keys.find(key); it != keys.end() && closes) {
      best = DictMatch{len, &it->second};
    }
    if (edges[pos].lead != 0 && len > 1) break;
  }
  return best;
}

}  // namespace

LeetMap LeetMap::Default() {
  LeetMap m;
  m.table = {{U'1', U'i'}, {U'3', U'e'}, {U'4', U'a'}, {U'5', U's'},
             {U'0', U'o'}, {U'@', U'a'}, {U'$', U's'}, {U'!', U'i'}};
  return m;
}

LeetMap LoadLeetMap(std::istream& in) {
  LeetMap m;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    if (TrimAscii(line).empty() || line[0] == '#') continue;
    const auto cells = SplitString(line, '\t');
    if (cells.size() != 2) {
      throw ParseError("expected `from<TAB>to`", line_no);
    }
    const auto from = DecodeUtf8(cells[0]);
    const auto to = DecodeUtf8(cells[1]);
    if (from.size() != 1 || to.size() != 1) {
      throw ParseError("leet entries must be single characters", line_no);
    }
    if (!IsLetter(to[0])) {
      throw ParseError("leet target must be a letter", line_no);
    }
    m.table[from[0]] = to[0];
  }
  return m;
}

void WriteLeetMap(std::ostream& out, const LeetMap& map) {
  for (const auto& [from, to] : map.table) {
    out << EncodeUtf8(from) << '\t' << EncodeUtf8(to) << '\n';
  }
}

// ---------------------------------------------------------------------------

VariantDictionary VariantDictionary::Load(std::istream& in) {
  VariantDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    if (TrimAscii(line).empty() || line[0] == '#') continue;
    if (!IsValidUtf8(line)) throw ParseError("invalid UTF-8", line_no);
    const auto cells = SplitString(line, '\t');
    if (cells.size() != 2) {
      throw ParseError("expected `variant<TAB>canonical`", line_no);
    }
    try {
      dict.Add(TrimAscii(cells[0]), TrimAscii(cells[1]));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return dict;
}

VariantDictionary VariantDictionary::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open variant dictionary '" + path + "'");
  return Load(in);
}

void VariantDictionary::Write(std::ostream& out) const {
  for (const auto& [variant, canonical] : entries_) {
    out << variant << '\t' << canonical << '\n';
  }
}

void VariantDictionary::Add(std::string_view variant,
                            std::string_view canonical) {
  if (variant.empty() || canonical.empty()) {
    throw ValidationError("empty variant or canonical form");
  }
  const std::string key = LowercaseUtf8(variant);
  const std::string value(canonical);
  auto [it, inserted] = entries_.emplace(key, value);
  if (!inserted && it->second != value) {
    throw ValidationError("variant '" + key + "' maps to both '" +
                          it->second + "' and '" + value + "'");
  }
}

// ---------------------------------------------------------------------------

Normalizer::Normalizer() : Normalizer(VariantDictionary{}) {}

Normalizer::Normalizer(const VariantDictionary& dict, LeetMap leet)
    : dict_(dict), leet_(std::move(leet)) {
  std::vector<std::string> canonicals;
  for (const auto& [variant, canonical] : dict_.entries()) {
    const std::string canon = LowercaseUtf8(Fold(canonical));
    if (canon != LowercaseUtf8(canonical) || Tokenize(canon).size() != 1 ||
        SplitEdges(canon).core != canon) {
      throw ValidationError("canonical form '" + canonical +
                            "' must be a single folded word");
    }
    std::vector<std::string> key;
    for (const auto& part : SplitWhitespace(variant)) {
      const std::string folded = LowercaseUtf8(Fold(part));
      for (const auto& piece : SplitWhitespace(folded)) {
        const EdgePunct edges = SplitEdges(piece);
        if (edges.lead != 0 || edges.trail != 0 || edges.core.empty()) {
          throw ValidationError("variant '" + variant +
                                "' folds to a form with edge punctuation");
        }
        key.push_back(edges.core);
      }
    }
    if (key.empty()) {
      throw ValidationError("variant '" + variant + "' folds to nothing");
    }
    // Folding alone already reaches the canonical form.
    if (key.size() == 1 && key[0] == canon) continue;
    auto [it, inserted] = keys_.emplace(key, canon);
    if (!inserted && it->second != canon) {
      throw ValidationError("variant '" + variant + "' folds onto a key of '" +
                            it->second + "' but maps to '" + canon + "'");
    }
    canonicals.push_back(canon);
    max_key_tokens_ = std::max(max_key_tokens_, key.size());
  }
  // No chains: a canonical word may not appear inside any key, otherwise a
  // second pass would rewrite the output of the first.
  for (const auto& [key, canon] : keys_) {
    for (const auto& part : key) {
      if (std::find(canonicals.begin(), canonicals.end(), part) !=
          canonicals.end()) {
        throw ValidationError("canonical word '" + part +
                              "' is also used as a variant");
      }
    }
  }
}

std::string Normalizer::Leet(std::string_view token) const {
  std::u32string cps = DecodeUtf8(token);
  if (std::none_of(cps.begin(), cps.end(), IsLetter)) return std::string(token);
  std::vector<bool> alnum_after(cps.size(), false);
  for (std::size_t i = cps.size(); i-- > 1;) {
    alnum_after[i - 1] =
        alnum_after[i] || u_isalnum(static_cast<UChar32>(cps[i]));
  }
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const auto it = leet_.table.find(cps[i]);
    if (it == leet_.table.end()) continue;
    if (IsDigit(cps[i]) || alnum_after[i]) cps[i] = it->second;
  }
  return EncodeUtf8(cps);
}

std::string Normalizer::Fold(std::string_view token) const {
  const std::string folded = EncodeUtf8(FoldChars(DecodeUtf8(token)));
  return EncodeUtf8(Squeeze(DecodeUtf8(Leet(folded))));
}

NormalizedDocument Normalizer::Normalize(std::string_view raw) const {
  NormalizedDocument doc;
  doc.original = std::string(raw);
  std::vector<TraceEdit> mention_edits, url_edits, fold_edits, leet_edits,
      squeeze_edits, dict_edits, lower_edits, space_edits;

  // Whitespace-delimited raw tokens with their byte spans.
  const std::u32string cps = DecodeUtf8(raw);
  std::vector<WorkToken> tokens;
  {
    std::size_t byte = 0;
    std::size_t start_byte = 0;
    std::u32string current;
    auto flush = [&](std::size_t end_byte) {
      if (!current.empty()) {
        tokens.push_back({EncodeUtf8(current), start_byte, end_byte});
        current.clear();
      }
    };
    for (char32_t c : cps) {
      const std::size_t width = EncodeUtf8(c).size();
      if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
        flush(byte);
      } else {
        if (current.empty()) start_byte = byte;
        current.push_back(c);
      }
      byte += width;
    }
    flush(byte);
  }

  // Steps 1–3: detect mentions and links on the folded view, fold the rest.
  std::vector<WorkToken> work;
  for (const auto& tok : tokens) {
    const std::u32string folded = FoldChars(DecodeUtf8(tok.text));
    const std::string folded_utf8 = EncodeUtf8(folded);
    bool changed_by_fold = folded_utf8 != tok.text;
    for (const auto& piece : SplitOnSpaces(folded)) {
      std::vector<std::u32string> parts;
      if (SplitMentions(piece, parts)) {
        mention_edits.push_back({tok.begin, tok.end, "mention", tok.text,
                                 EncodeUtf8(piece)});
        mention_edits.back().after.clear();
        for (const auto& p : parts) {
          if (!mention_edits.back().after.empty()) {
            mention_edits.back().after += ' ';
          }
          mention_edits.back().after += EncodeUtf8(p);
          work.push_back({EncodeUtf8(p), tok.begin, tok.end});
        }
        continue;
      }
      if (IsUrl(piece)) {
        url_edits.push_back({tok.begin, tok.end, "url", tok.text, ""});
        continue;
      }
      work.push_back({EncodeUtf8(piece), tok.begin, tok.end});
    }
    if (changed_by_fold) {
      fold_edits.push_back({tok.begin, tok.end, "fold", tok.text, folded_utf8});
    }
  }

  // Steps 4–5.
  for (auto& tok : work) {
    if (tok.text == kUserToken) continue;
    const std::string leeted = Leet(tok.text);
    if (leeted != tok.text) {
      leet_edits.push_back({tok.begin, tok.end, "leet", tok.text, leeted});
    }
    const std::string squeezed = EncodeUtf8(Squeeze(DecodeUtf8(leeted)));
    if (squeezed != leeted) {
      squeeze_edits.push_back(
          {tok.begin, tok.end, "squeeze", leeted, squeezed});
    }
    tok.text = squeezed;
  }

  // Step 6: longest dictionary match, left to right.
  std::vector<WorkToken> mapped;
  {
    std::vector<EdgePunct> edges;
    for (const auto& tok : work) {
      edges.push_back(tok.text == kUserToken ? EdgePunct{}
                                             : SplitEdges(tok.text));
    }
    std::size_t i = 0;
    while (i < work.size()) {
      std::optional<DictMatch> m;
      if (!keys_.empty() && work[i].text != kUserToken) {
        m = LongestDictMatch(keys_, max_key_tokens_, edges, i);
      }
      if (!m) {
        mapped.push_back(work[i]);
        ++i;
        continue;
      }
      const WorkToken& first = work[i];
      const WorkToken& last = work[i + m->length - 1];
      std::string before;
      for (std::size_t k = i; k < i + m->length; ++k) {
        if (k > i) before += ' ';
        before += work[k].text;
      }
      const std::string after =
          first.text.substr(0, edges[i].lead) + *m->canonical +
          last.text.substr(last.text.size() - edges[i + m->length - 1].trail);
      dict_edits.push_back({first.begin, last.end, "dictionary", before, after});
      mapped.push_back({after, first.begin, last.end});
      i += m->length;
    }
  }

  // Step 7.
  for (auto& tok : mapped) {
    if (tok.text == kUserToken) continue;
    const std::string lower = LowercaseUtf8(tok.text);
    if (lower != tok.text) {
      lower_edits.push_back({tok.begin, tok.end, "lowercase", tok.text, lower});
      tok.text = lower;
    }
  }

  // Step 8.
  for (const auto& tok : mapped) {
    if (tok.text.empty()) continue;
    doc.tokens.push_back(tok.text);
  }
  doc.normalized = JoinStrings(doc.tokens, " ");
  {
    // Any whitespace other than single spaces between tokens was collapsed.
    std::string spaced;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (k > 0) spaced += ' ';
      spaced += tokens[k].text;
    }
    if (spaced != raw) {
      space_edits.push_back({0, raw.size(), "whitespace", std::string(raw),
                             spaced});
    }
  }

  for (auto* list : {&mention_edits, &url_edits, &fold_edits, &leet_edits,
                     &squeeze_edits, &dict_edits, &lower_edits, &space_edits}) {
    doc.trace.insert(doc.trace.end(), list->begin(), list->end());
  }
  return doc;
}

// ---------------------------------------------------------------------------

NormalizedDocument NormalizeText(std::string_view raw,
                                 const VariantDictionary& dict) {
  return Normalizer(dict).Normalize(raw);
}

std::string FoldObfuscation(std::string_view token) {
  static const Normalizer plain;
  return plain.Fold(token);
}

std::vector<std::string> Tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  for (auto& piece : SplitString(normalized, ' ')) {
    if (!piece.empty()) tokens.push_back(std::move(piece));
  }
  return tokens;
}

std::vector<std::string> SplitWhitespace(std::string_view raw) {
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : DecodeUtf8(raw)) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      if (!current.empty()) tokens.push_back(EncodeUtf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(EncodeUtf8(current));
  return tokens;
}

std::string TokenCore(std::string_view token) {
  return SplitEdges(token).core;
}

}  // namespace offlang
