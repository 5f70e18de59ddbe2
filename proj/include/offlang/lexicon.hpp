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

// Two-tier blacklist with leftmost-longest phrase matching over normalized
// tokens.

#ifndef OFFLANG_LEXICON_HPP_
#define OFFLANG_LEXICON_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "offlang/normalize.hpp"

namespace offlang {

enum class Tier { kOffensive, kContextual };

std::string_view ToString(Tier tier);

struct LexiconEntry {
  std::vector<std::string> phrase;  // canonical tokens
  Tier tier;
};

struct TierMatch {
  std::size_t begin;  // token index, inclusive
  std::size_t end;    // token index, exclusive
  Tier tier;

  friend bool operator==(const TierMatch&, const TierMatch&) = default;
};

struct TierCounts {
  std::size_t offensive = 0;
  std::size_t contextual = 0;
  std::vector<TierMatch> matches;

  std::size_t total() const { return offensive + contextual; }
};

class Lexicon {
 public:
  Lexicon();

  // Phrases are stored as given; callers are expected to pass canonical
  // tokens. Throws ValidationError on an empty phrase or a phrase already
  // present in the other tier. Re-adding a (phrase, tier) pair is a no-op.
  void Add(std::vector<std::string> phrase, Tier tier);

  TierCounts Match(const std::vector<std::string>& tokens) const;

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Writes `TIER<TAB>phrase` lines.
  void Write(std::ostream& out) const;

 private:
  // Token trie; node 0 is the root.
  struct Node {
    std::map<std::string, std::size_t> next;
    int tier = -1;  // -1: no phrase ends here
  };

  std::vector<LexiconEntry> entries_;
  std::vector<Node> nodes_;
};

// Reads `tier<TAB>phrase` lines (tier is OFFENSIVE or CONTEXTUAL, '#' starts
// a comment). Each phrase is run through `normalizer` before indexing.
Lexicon LoadLexicon(std::istream& in, const Normalizer& normalizer);
Lexicon LoadLexiconFile(const std::string& path, const Normalizer& normalizer);

TierCounts MatchCounts(const std::vector<std::string>& tokens,
                       const Lexicon& lexicon);

}  // namespace offlang

#endif  // OFFLANG_LEXICON_HPP_
