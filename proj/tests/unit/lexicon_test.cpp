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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "offlang/common.hpp"
#include "offlang/normalize.hpp"

namespace offlang {
namespace {

Lexicon Load(const std::string& text) {
  std::istringstream in(text);
  return LoadLexicon(in, Normalizer());
}

// Phrases over the alphabet {a, b, c, d, e}: prefixes, overlaps and a
// phrase in each tier.
Lexicon OracleLexicon() {
  Lexicon lex;
  lex.Add({"a"}, Tier::kOffensive);
  lex.Add({"a", "b"}, Tier::kContextual);
  lex.Add({"a", "b", "c"}, Tier::kOffensive);
  lex.Add({"b", "c"}, Tier::kContextual);
  lex.Add({"c", "a"}, Tier::kOffensive);
  lex.Add({"d", "d", "d"}, Tier::kContextual);
  return lex;
}

// Scans every start position and every span length; the longest phrase
// starting at the leftmost unconsumed position wins.
std::vector<TierMatch> BruteForce(const std::vector<std::string>& tokens,
                                  const Lexicon& lex) {
  std::vector<TierMatch> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best = 0;
    Tier tier = Tier::kOffensive;
    for (std::size_t len = 1; i + len <= tokens.size(); ++len) {
      for (const auto& e : lex.entries()) {
        if (e.phrase.size() != len) continue;
        if (std::equal(e.phrase.begin(), e.phrase.end(),
                       tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
          best = len;
          tier = e.tier;
        }
      }
    }
    if (best == 0) {
      ++i;
    } else {
      out.push_back({i, i + best, tier});
      i += best;
    }
  }
  return out;
}

void CheckAgainstOracle(const std::vector<std::string>& tokens, const Lexicon& lex) {
  const TierCounts got = lex.Match(tokens);
  const auto want = BruteForce(tokens, lex);
  ASSERT_EQ(got.matches, want);
  std::size_t off = 0, ctx = 0;
  for (const auto& m : want) (m.tier == Tier::kOffensive ? off : ctx)++;
  ASSERT_EQ(got.offensive, off);
  ASSERT_EQ(got.contextual, ctx);
}

TEST(LexiconTest, EmptyFile) {
  const Lexicon lex = Load("");
  EXPECT_TRUE(lex.empty());
  const auto c = MatchCounts({"any", "thing"}, lex);
  EXPECT_EQ(c.offensive, 0u);
  EXPECT_EQ(c.contextual, 0u);
}

TEST(LexiconTest, MultiWordEntry) {
  const Lexicon lex = Load("CONTEXTUAL\tpearl necklace\n");
  ASSERT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex.entries()[0].phrase, (std::vector<std::string>{"pearl", "necklace"}));
  EXPECT_EQ(lex.entries()[0].tier, Tier::kContextual);
}

TEST(LexiconTest, CrossTierDuplicateIsError) {
  EXPECT_THROW(Load("OFFENSIVE\tbloody\nCONTEXTUAL\tbloody\n"), ParseError);
}

TEST(LexiconTest, UnknownTierReportsLine) {
  try {
    Load("OFFENSIVE\tidiot\n# comment\nMILD\tdarn\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LexiconTest, PhrasesAreNormalizedOnLoad) {
  const Lexicon lex = Load("OFFENSIVE\tID10T\n");
  EXPECT_EQ(lex.entries()[0].phrase, (std::vector<std::string>{"idiot"}));
}

TEST(MatchTest, Examples) {
  EXPECT_EQ(MatchCounts({}, OracleLexicon()).total(), 0u);
  const Lexicon fixture = Load("CONTEXTUAL\tbloody\nOFFENSIVE\tidiot\n");
  const auto c = MatchCounts({"you", "bloody", "idiot"}, fixture);
  EXPECT_EQ(c.offensive, 1u);
  EXPECT_EQ(c.contextual, 1u);

  const Lexicon pearl = Load("CONTEXTUAL\tpearl necklace\n");
  const auto p = MatchCounts({"pearl", "necklace", "pearl"}, pearl);
  EXPECT_EQ(p.contextual, 1u);
  ASSERT_EQ(p.matches.size(), 1u);
  EXPECT_EQ(p.matches[0].begin, 0u);
  EXPECT_EQ(p.matches[0].end, 2u);
}

TEST(MatchTest, LeftmostLongest) {
  const Lexicon lex = OracleLexicon();
  const auto c = lex.Match({"a", "b", "c"});
  ASSERT_EQ(c.matches.size(), 1u);
  EXPECT_EQ(c.matches[0].end, 3u);
  EXPECT_EQ(c.offensive, 1u);
}

TEST(MatchTest, PaddingInvariance) {
  const Lexicon lex = OracleLexicon();
  const std::vector<std::string> core = {"c", "a", "b", "d", "d", "d", "a"};
  const auto base = lex.Match(core);
  std::vector<std::string> padded = {"x", "y"};
  padded.insert(padded.end(), core.begin(), core.end());
  padded.push_back("z");
  const auto c = lex.Match(padded);
  EXPECT_EQ(c.offensive, base.offensive);
  EXPECT_EQ(c.contextual, base.contextual);
}

TEST(MatchTest, ExhaustiveAgainstBruteForceUpToLength8) {
  const Lexicon lex = OracleLexicon();
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
  for (std::size_t len = 0; len <= 8; ++len) {
    std::vector<std::size_t> digits(len, 0);
    std::vector<std::string> tokens(len);
    for (;;) {
      for (std::size_t k = 0; k < len; ++k) tokens[k] = alphabet[digits[k]];
      CheckAgainstOracle(tokens, lex);
      std::size_t k = 0;
      while (k < len && ++digits[k] == alphabet.size()) digits[k++] = 0;
      if (k == len) break;
    }
  }
}

TEST(MatchTest, SampledAgainstBruteForceLengths9To12) {
  const Lexicon lex = OracleLexicon();
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
  Rng rng(17);
  for (std::size_t len = 9; len <= 12; ++len) {
    for (int trial = 0; trial < 20000; ++trial) {
      std::vector<std::string> tokens(len);
      for (auto& t : tokens) t = alphabet[rng.Index(alphabet.size())];
      CheckAgainstOracle(tokens, lex);
    }
  }
}

TEST(MatchTest, PunctuationAndCaseAroundTokens) {
  const Lexicon fixture = Load("OFFENSIVE\tidiot\n");
  EXPECT_EQ(MatchCounts({"IDIOT!!", "(idiot)"}, fixture).offensive, 2u);
}

TEST(LexiconTest, WriteLoadRoundTrip) {
  std::ifstream file(std::string(OFFLANG_DATA_DIR) + "/lexicon.tsv");
  ASSERT_TRUE(file);
  const Lexicon lex = LoadLexicon(file, Normalizer());
  ASSERT_GT(lex.size(), 10u);
  std::ostringstream out;
  lex.Write(out);
  const Lexicon back = Load(out.str());
  ASSERT_EQ(back.size(), lex.size());
  for (std::size_t i = 0; i < lex.size(); ++i) {
    EXPECT_EQ(back.entries()[i].phrase, lex.entries()[i].phrase);
    EXPECT_EQ(back.entries()[i].tier, lex.entries()[i].tier);
  }
}

}  // namespace
}  // namespace offlang
