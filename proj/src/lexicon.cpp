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

#include "offlang/lexicon.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "offlang/common.hpp"

namespace offlang {

std::string_view ToString(Tier tier) {
  return tier == Tier::kOffensive ? "OFFENSIVE" : "CONTEXTUAL";
}

Lexicon::Lexicon() : nodes_(1) {}

void Lexicon::Add(std::vector<std::string> phrase, Tier tier) {
  if (phrase.empty()) throw ValidationError("empty lexicon phrase");
  std::size_t node = 0;
  for (const auto& token : phrase) {
    auto it = nodes_[node].next.find(token);
    if (it == nodes_[node].next.end()) {
      nodes_.emplace_back();
      it = nodes_[node].next.emplace(token, nodes_.size() - 1).first;
    }
    node = it->second;
  }
  const int t = static_cast<int>(tier);
  if (nodes_[node].tier == t) return;
  if (nodes_[node].tier != -1) {
    throw ValidationError("phrase '" + JoinStrings(phrase, " ") +
                          "' appears in both tiers");
  }
  nodes_[node].tier = t;
  entries_.push_back({std::move(phrase), tier});
}

TierCounts Lexicon::Match(const std::vector<std::string>& tokens) const {
  TierCounts counts;
  std::vector<std::string> keys;
  keys.reserve(tokens.size());
  for (const auto& t : tokens) keys.push_back(TokenCore(t));

  std::size_t i = 0;
  while (i < keys.size()) {
    std::size_t node = 0;
    std::size_t best_end = 0;
    int best_tier = -1;
    for (std::size_t j = i; j < keys.size(); ++j) {
      const auto it = nodes_[node].next.find(keys[j]);
      if (it == nodes_[node].next.end()) break;
      node = it->second;
      if (nodes_[node].tier != -1) {
        best_end = j + 1;
        best_tier = nodes_[node].tier;
      }
    }
    if (best_tier == -1) {
      ++i;
      continue;
    }
    const Tier tier = static_cast<Tier>(best_tier);
    counts.matches.push_back({i, best_end, tier});
    if (tier == Tier::kOffensive) {
      ++counts.offensive;
    } else {
      ++counts.contextual;
    }
    i = best_end;
  }
  return counts;
}

void Lexicon::Write(std::ostream& out) const {
  for (const auto& e : entries_) {
    out << ToString(e.tier) << '\t' << JoinStrings(e.phrase, " ") << '\n';
  }
}

Lexicon LoadLexicon(std::istream& in, const Normalizer& normalizer) {
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    if (TrimAscii(line).empty() || line[0] == '#') continue;
    if (!IsValidUtf8(line)) throw ParseError("invalid UTF-8", line_no);
    const auto cells = SplitString(line, '\t');
    if (cells.size() != 2) {
      throw ParseError("expected `tier<TAB>phrase`", line_no);
    }
    const std::string_view tier_name = TrimAscii(cells[0]);
    Tier tier;
    if (tier_name == "OFFENSIVE") {
      tier = Tier::kOffensive;
    } else if (tier_name == "CONTEXTUAL") {
      tier = Tier::kContextual;
    } else {
      throw ParseError("unknown tier '" + std::string(tier_name) + "'",
                       line_no);
    }
    std::vector<std::string> phrase;
    for (const auto& token : normalizer.Normalize(cells[1]).tokens) {
      std::string core = TokenCore(token);
      if (!core.empty()) phrase.push_back(std::move(core));
    }
    if (phrase.empty()) {
      throw ParseError("phrase normalizes to nothing", line_no);
    }
    try {
      lexicon.Add(std::move(phrase), tier);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return lexicon;
}

Lexicon LoadLexiconFile(const std::string& path, const Normalizer& normalizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open lexicon '" + path + "'");
  return LoadLexicon(in, normalizer);
}

TierCounts MatchCounts(const std::vector<std::string>& tokens,
                       const Lexicon& lexicon) {
  return lexicon.Match(tokens);
}

}  // namespace offlang
