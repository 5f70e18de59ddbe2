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

#include "offlang/featurize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "offlang/common.hpp"

namespace offlang {
namespace {

double Feature(const FeatureVector& fv, const std::string& name) {
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (fv.names[i] == name) return fv.values[i];
  }
  ADD_FAILURE() << "no feature " << name;
  return NAN;
}

FeatureVector Graphemic(const std::string& raw) {
  return GraphemicFeatures(raw, Normalizer().Normalize(raw));
}

TEST(GraphemicTest, EmptyIsAllZeros) {
  const FeatureVector fv = Graphemic("");
  ASSERT_EQ(fv.size(), kGraphemicSize);
  EXPECT_EQ(fv.names, GraphemicNames());
  for (double v : fv.values) EXPECT_EQ(v, 0.0);
}

TEST(GraphemicTest, MixedCase) {
  const FeatureVector fv = Graphemic("ABC def!");
  EXPECT_EQ(Feature(fv, "g_upper"), 3.0);
  EXPECT_EQ(Feature(fv, "g_upper_ratio"), 0.5);
  EXPECT_EQ(Feature(fv, "g_exclaim"), 1.0);
  EXPECT_EQ(Feature(fv, "g_tokens"), 2.0);
  EXPECT_EQ(Feature(fv, "g_chars"), 8.0);
}

TEST(GraphemicTest, ShoutedAcronym) {
  const FeatureVector fv = Graphemic("WTF!!!");
  EXPECT_EQ(Feature(fv, "g_upper"), 3.0);
  EXPECT_EQ(Feature(fv, "g_upper_ratio"), 1.0);
  EXPECT_EQ(Feature(fv, "g_special"), 3.0);
  EXPECT_EQ(Feature(fv, "g_elongated"), 1.0);
}

TEST(GraphemicTest, MentionsCountAsTokensOnly) {
  const FeatureVector with = Graphemic("@JOHN hi");
  const FeatureVector without = Graphemic("hi");
  EXPECT_EQ(Feature(with, "g_tokens"), 2.0);
  EXPECT_EQ(Feature(with, "g_upper"), 0.0);
  EXPECT_EQ(Feature(with, "g_special"), 0.0);
  EXPECT_EQ(Feature(with, "g_mean_token_len"), Feature(without, "g_mean_token_len"));
}

TEST(GraphemicTest, StripMentions) {
  EXPECT_EQ(StripMentions(U"a @bob b"), U"a  b");
  EXPECT_EQ(StripMentions(U"mail x@y.z"), U"mail x@y.z");
  EXPECT_EQ(StripMentions(U"@ alone"), U"@ alone");
}

// Character statistics checked against a frozen table produced by an
// independent Python implementation over 1,000 random strings.
TEST(GraphemicTest, AgreesWithPythonOracle) {
  std::ifstream in(std::string(OFFLANG_TEST_DATA_DIR) + "/graphemic_oracle.tsv");
  ASSERT_TRUE(in);
  const std::vector<std::string> char_features = {
      "g_chars", "g_upper", "g_upper_ratio", "g_special",  "g_punct",
      "g_exclaim", "g_question", "g_digits", "g_elongated"};
  const Normalizer normalizer;
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto cells = SplitString(line, '\t');
    ASSERT_EQ(cells.size(), 2u);
    std::u32string text;
    std::istringstream cps(cells[0]);
    std::string hex;
    while (cps >> hex) text.push_back(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
    const std::string raw = EncodeUtf8(text);
    const NormalizedDocument doc = normalizer.Normalize(raw);
    const FeatureVector fv = GraphemicFeatures(raw, doc);

    std::istringstream want(cells[1]);
    for (const auto& name : char_features) {
      double v;
      ASSERT_TRUE(want >> v);
      EXPECT_NEAR(Feature(fv, name), v, 1e-12) << name << " on line " << rows + 1;
    }
    double chars = 0, words = 0;
    for (const auto& t : doc.tokens) {
      if (t == kUserToken) continue;
      chars += static_cast<double>(DecodeUtf8(t).size());
      ++words;
    }
    EXPECT_EQ(Feature(fv, "g_tokens"), static_cast<double>(doc.tokens.size()));
    EXPECT_DOUBLE_EQ(Feature(fv, "g_mean_token_len"), words > 0 ? chars / words : 0.0);
    ++rows;
  }
  EXPECT_EQ(rows, 1000u);
}

TfidfModel TwoDocModel(bool l2) {
  TfidfConfig config;
  config.l2_normalize = l2;
  return FitTfidf({{"a", "b"}, {"a"}}, config);
}

TEST(TfidfTest, SmoothedIdf) {
  const TfidfModel m = TwoDocModel(true);
  ASSERT_EQ(m.terms(), (std::vector<std::string>{"a", "b"}));
  EXPECT_NEAR(m.idf()[0], 1.0, 1e-12);
  EXPECT_NEAR(m.idf()[1], std::log(1.5) + 1.0, 1e-12);
  EXPECT_NEAR(m.idf()[1], 1.405465, 1e-6);
}

TEST(TfidfTest, SingleDocumentHasUniformIdf) {
  const TfidfModel m = FitTfidf({{"x", "y", "z", "x"}});
  for (double v : m.idf()) EXPECT_EQ(v, m.idf()[0]);
}

TEST(TfidfTest, TransformValues) {
  const SparseVector raw = TransformTfidf(TwoDocModel(false), {"a", "a", "b"});
  ASSERT_EQ(raw.size(), 2u);
  EXPECT_EQ(raw[0].first, 0u);
  EXPECT_NEAR(raw[0].second, 2.0, 1e-12);
  EXPECT_NEAR(raw[1].second, 1.405465, 1e-6);

  const Vector dense = TwoDocModel(true).TransformDense({"a", "a", "b"});
  EXPECT_NEAR(dense.norm(), 1.0, 1e-12);
  EXPECT_NEAR(dense[0] / dense[1], 2.0 / (std::log(1.5) + 1.0), 1e-12);
}

TEST(TfidfTest, EmptyAndOovAreZero) {
  const TfidfModel m = TwoDocModel(true);
  EXPECT_TRUE(m.Transform({}).empty());
  EXPECT_TRUE(m.Transform({"zz", "q"}).empty());
  EXPECT_EQ(m.TransformDense({"zz"}), Vector::Zero(2));
  EXPECT_THROW(FitTfidf({}), ValidationError);
}

TEST(TfidfTest, SaveLoadRoundTrip) {
  const TfidfModel m = FitTfidf({{"a", "b\tc"}, {"a", "d"}, {"e"}});
  std::stringstream buf;
  m.Save(buf);
  const TfidfModel back = TfidfModel::Load(buf);
  EXPECT_EQ(back.terms(), m.terms());
  EXPECT_EQ(back.idf(), m.idf());
  EXPECT_EQ(back.TransformDense({"a", "b\tc"}), m.TransformDense({"a", "b\tc"}));
}

EmbeddingMatrix ThreeWords() {
  Matrix v(3, 2);
  v << 1, 2, 3, 4, -1, 0.5;
  return EmbeddingMatrix({"x", "y", "z"}, v);
}

TEST(PoolTest, Examples) {
  const EmbeddingMatrix e = ThreeWords();
  EXPECT_EQ(PoolEmbedding({}, e), Vector::Zero(2));
  EXPECT_EQ(PoolEmbedding({"y"}, e), e.Row(1));
  const Vector mean = PoolEmbedding({"x", "y"}, e);
  EXPECT_DOUBLE_EQ(mean[0], 2.0);
  EXPECT_DOUBLE_EQ(mean[1], 3.0);
  EXPECT_EQ(PoolEmbedding({"x", "unknown"}, e), e.Row(0));
  EXPECT_EQ(PoolEmbedding({"unknown"}, e), Vector::Zero(2));
}

class AssemblerTest : public ::testing::Test {
 protected:
  AssemblerTest()
      : lm_off_(CharGramLm::Train({"idiot", "moron"}, CharLmConfig{})),
        lm_clean_(CharGramLm::Train({"table", "river"}, CharLmConfig{})) {
    lexicon_.Add({"idiot"}, Tier::kOffensive);
    lexicon_.Add({"bloody"}, Tier::kContextual);
  }

  std::vector<std::string> BaseNames(std::size_t n) const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("b" + std::to_string(i));
    return names;
  }

  FeatureAssembler Make(FeatureBlocks blocks, std::size_t base) const {
    return FeatureAssembler(blocks, BaseNames(base), &lexicon_, &lm_off_, &lm_clean_);
  }

  Lexicon lexicon_;
  CharGramLm lm_off_;
  CharGramLm lm_clean_;
};

TEST_F(AssemblerTest, FullLength) {
  const FeatureAssembler a = Make(FeatureBlocks{}, 300);
  EXPECT_EQ(a.size(), 316u);
  const std::string raw = "you BLOODY idiot!!";
  const auto fv = a.Assemble(raw, Normalizer().Normalize(raw), Vector::Ones(300));
  ASSERT_EQ(fv.size(), 316u);
  EXPECT_EQ(fv.names, a.names());
  EXPECT_EQ(fv.values[300 + kGraphemicSize], 1.0);      // offensive
  EXPECT_EQ(fv.values[300 + kGraphemicSize + 1], 1.0);  // contextual
  EXPECT_EQ(fv.values[300 + kGraphemicSize + 2], 2.0);  // sum
}

TEST_F(AssemblerTest, AllBlocksOffIsBase) {
  const FeatureAssembler a = Make(FeatureBlocks{false, false, false}, 4);
  Vector base(4);
  base << 0.5, -1, 2, 0;
  const auto fv = a.Assemble("hi", Normalizer().Normalize("hi"), base);
  ASSERT_EQ(fv.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(fv.values[i], base[i]);
}

TEST_F(AssemblerTest, BlockRemovalDropsOnlyItsColumns) {
  const FeatureAssembler full = Make(FeatureBlocks{}, 3);
  const std::set<std::string> all(full.names().begin(), full.names().end());
  for (int mask = 0; mask < 8; ++mask) {
    const FeatureBlocks blocks{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
    const FeatureAssembler a = Make(blocks, 3);
    std::size_t want = 3;
    want += blocks.graphemic ? kGraphemicSize : 0;
    want += blocks.lexicon ? 3 : 0;
    want += blocks.perplexity ? 2 : 0;
    ASSERT_EQ(a.size(), want);
    // Columns keep their relative order.
    std::size_t j = 0;
    for (const auto& n : a.names()) {
      EXPECT_TRUE(all.count(n));
      while (j < full.names().size() && full.names()[j] != n) ++j;
      EXPECT_LT(j, full.names().size()) << n;
    }
    if (!blocks.graphemic) {
      for (const auto& g : GraphemicNames()) {
        EXPECT_EQ(std::count(a.names().begin(), a.names().end(), g), 0);
      }
    }
  }
}

TEST_F(AssemblerTest, LayoutDoesNotDependOnText) {
  const FeatureAssembler a = Make(FeatureBlocks{}, 2);
  for (const char* raw : {"", "@x", "idiot idiot bloody", "ünïcödé 123 !!!"}) {
    const auto fv = a.Assemble(raw, Normalizer().Normalize(raw), Vector::Zero(2));
    EXPECT_EQ(fv.names, a.names());
    const auto again = a.Assemble(raw, Normalizer().Normalize(raw), Vector::Zero(2));
    EXPECT_EQ(fv.values, again.values);
  }
}

TEST_F(AssemblerTest, BaseDimensionDriftIsError) {
  const FeatureAssembler a = Make(FeatureBlocks{}, 3);
  EXPECT_THROW(a.Assemble("x", Normalizer().Normalize("x"), Vector::Zero(4)),
               ValidationError);
}

TEST(ScoredTokensTest, DropsUserAndPunctuation) {
  EXPECT_EQ(ScoredTokens({"<USER>", "hey!", "...", "you"}),
            (std::vector<std::string>{"hey", "you"}));
}

TEST(FeatureConfigTest, WriteReadRoundTrip) {
  FeatureConfig c;
  c.base = BaseVectorizer::kEmbedding;
  c.blocks.lexicon = false;
  c.tfidf.min_df = 3;
  c.tfidf.max_features = 77;
  c.normalize = false;
  std::stringstream buf;
  WriteFeatureConfig(buf, c);
  EXPECT_EQ(ReadFeatureConfig(buf), c);
  EXPECT_THROW(ParseBaseVectorizer("bert"), ValidationError);
}

}  // namespace
}  // namespace offlang
