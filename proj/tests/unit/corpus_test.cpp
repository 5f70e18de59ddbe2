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

#include "offlang/corpus.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "offlang/common.hpp"

namespace offlang {
namespace {

const char kHeader[] = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n";

std::vector<LabeledDocument> Parse(const std::string& body) {
  std::istringstream in(kHeader + body);
  return ParseOlid(in);
}

Dataset MakeData(const std::map<std::string, std::size_t>& counts) {
  Dataset d;
  for (const auto& [label, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) {
      Example ex;
      ex.doc.id = label + std::to_string(i);
      ex.doc.raw_text = "text " + ex.doc.id;
      ex.label = label;
      d.push_back(ex);
    }
  }
  return d;
}

TEST(OlidTest, HeaderOnlyIsEmpty) { EXPECT_TRUE(Parse("").empty()); }

TEST(OlidTest, FullRowMapsAllLabels) {
  const auto docs = Parse("17\t@u you suck\tOFF\tTIN\tIND\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].id, "17");
  EXPECT_EQ(docs[0].raw_text, "@u you suck");
  EXPECT_EQ(docs[0].label_a, OffenseLabel::kOff);
  EXPECT_EQ(docs[0].label_b, TargetingLabel::kTin);
  EXPECT_EQ(docs[0].label_c, TargetLabel::kInd);
}

TEST(OlidTest, NullMeansAbsent) {
  const auto docs = Parse("1\thello\tNOT\tNULL\tNULL\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_FALSE(docs[0].label_b.has_value());
  EXPECT_FALSE(docs[0].label_c.has_value());
}

TEST(OlidTest, HierarchyViolationIsValidationError) {
  EXPECT_THROW(Parse("1\thello\tNOT\tTIN\tNULL\n"), ValidationError);
  EXPECT_THROW(Parse("1\thello\tOFF\tNULL\tIND\n"), ValidationError);
}

TEST(OlidTest, WrongColumnCountReportsLine) {
  try {
    Parse("1\thello\tNOT\tNULL\tNULL\n2\tbad row\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(OlidTest, MissingHeaderIsParseError) {
  std::istringstream in("1\thello\tNOT\tNULL\tNULL\n");
  EXPECT_THROW(ParseOlid(in), ParseError);
}

TEST(OlidTest, WriteParseRoundTrip) {
  const auto docs = Parse(
      "1\thello there\tNOT\tNULL\tNULL\n"
      "2\t@u you suck\tOFF\tTIN\tGRP\n"
      "3\twhat a day\tOFF\tUNT\tNULL\n");
  std::ostringstream out;
  WriteOlid(out, docs);
  std::istringstream in(out.str());
  auto back = ParseOlid(in);
  for (auto& d : back) d.source = docs[0].source;
  EXPECT_EQ(back, docs);
}

TEST(InternalTsvTest, EscapesRoundTrip) {
  LabeledDocument d;
  d.id = "x1";
  d.raw_text = "line one\nline\ttwo \\ back";
  d.label_a = OffenseLabel::kOff;
  d.label_b = TargetingLabel::kTin;
  d.label_c = TargetLabel::kOth;
  d.source = "tsv";
  std::ostringstream out;
  WriteInternalTsv(out, {d});
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  std::istringstream in(out.str());
  const auto back = ParseInternalTsv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], d);
}

TEST(TaskTest, TargetLabels) {
  const auto docs = Parse(
      "1\thello\tNOT\tNULL\tNULL\n"
      "2\tyou suck\tOFF\tTIN\tIND\n"
      "3\twow\tOFF\tUNT\tNULL\n");
  EXPECT_EQ(MakeTaskDataset(docs, Task::k6A).size(), 3u);
  EXPECT_EQ(MakeTaskDataset(docs, Task::k6B).size(), 2u);
  const auto c = MakeTaskDataset(docs, Task::k6C);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].label, "IND");
  EXPECT_EQ(ParseTask("6-A"), Task::k6A);
  EXPECT_THROW(ParseTask("7-Z"), ValidationError);
}

TEST(SamplingPlanTest, CapsThenOversamples) {
  const auto plan = MakeSamplingPlan({{"A", 10}, {"B", 4}}, 2.0, 1);
  EXPECT_EQ(plan.targets.at("A"), 8u);
  EXPECT_EQ(plan.targets.at("B"), 8u);
}

TEST(SamplingPlanTest, BalancedIsUnchanged) {
  for (double r : {1.0, 2.0, 10.0}) {
    const auto plan = MakeSamplingPlan({{"A", 5}, {"B", 5}}, r, 1);
    EXPECT_EQ(plan.targets.at("A"), 5u);
    EXPECT_EQ(plan.targets.at("B"), 5u);
  }
}

TEST(SamplingPlanTest, ThreeClassCorpusCounts) {
  const auto plan =
      MakeSamplingPlan({{"IND", 18506}, {"GRP", 6761}, {"OTH", 1025}}, 3.0, 1);
  for (const auto& [label, n] : plan.targets) EXPECT_EQ(n, 3075u) << label;
}

TEST(SamplingPlanTest, Errors) {
  EXPECT_THROW(MakeSamplingPlan({{"A", 10}}, 2.0, 1), ValidationError);
  EXPECT_THROW(MakeSamplingPlan({{"A", 10}, {"B", 0}}, 2.0, 1), ValidationError);
}

TEST(ApplySamplingTest, ExactCountsSubsetAndMultiset) {
  const Dataset data = MakeData({{"A", 10}, {"B", 4}});
  const auto plan = MakeSamplingPlan(ClassCounts(data), 2.0, 99);
  const Dataset out = ApplySampling(data, plan);
  const auto counts = ClassCounts(out);
  EXPECT_EQ(counts.at("A"), 8u);
  EXPECT_EQ(counts.at("B"), 8u);
  std::set<std::string> a_ids;
  for (const auto& ex : out) {
    if (ex.label == "A") a_ids.insert(ex.doc.id);
  }
  EXPECT_EQ(a_ids.size(), 8u);  // downsampling is without replacement
}

TEST(ApplySamplingTest, IdentityPlanKeepsIds) {
  const Dataset data = MakeData({{"A", 6}, {"B", 6}});
  const Dataset out = ApplySampling(data, MakeUnbalancedPlan(ClassCounts(data), 3));
  std::multiset<std::string> in_ids, out_ids;
  for (const auto& ex : data) in_ids.insert(ex.doc.id);
  for (const auto& ex : out) out_ids.insert(ex.doc.id);
  EXPECT_EQ(in_ids, out_ids);
}

TEST(ApplySamplingTest, DeterministicUnderSeed) {
  const Dataset data = MakeData({{"A", 30}, {"B", 7}, {"C", 12}});
  const auto plan = MakeSamplingPlan(ClassCounts(data), 2.0, 5);
  const Dataset x = ApplySampling(data, plan);
  const Dataset y = ApplySampling(data, plan);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].doc.id, y[i].doc.id);
}

TEST(ApplySamplingTest, ExhaustiveSmallCounts) {
  for (std::size_t a = 1; a <= 12; ++a) {
    for (std::size_t b = 1; b <= 12; ++b) {
      for (double r : {1.0, 1.5, 2.0, 3.0}) {
        const Dataset data = MakeData({{"A", a}, {"B", b}});
        const auto plan = MakeSamplingPlan(ClassCounts(data), r, a * 31 + b);
        const auto counts = ClassCounts(ApplySampling(data, plan));
        EXPECT_EQ(counts.at("A"), plan.targets.at("A"));
        EXPECT_EQ(counts.at("B"), plan.targets.at("B"));
        EXPECT_EQ(plan.targets.at("A"), plan.targets.at("B"));
      }
    }
  }
}

TEST(ApplySamplingTest, MissingClassIsError) {
  const Dataset data = MakeData({{"A", 3}});
  SamplingPlan plan;
  plan.targets = {{"A", 3}, {"Z", 3}};
  EXPECT_THROW(ApplySampling(data, plan), ValidationError);
}

TEST(StratifiedSplitTest, SizesAndProportions) {
  const Dataset data = MakeData({{"A", 50}, {"B", 50}});
  const auto split = StratifiedSplit(data, {0.8, 0.1, 0.1}, 42);
  EXPECT_EQ(split.train.size(), 80u);
  EXPECT_EQ(split.dev.size(), 10u);
  EXPECT_EQ(split.test.size(), 10u);
  const auto tc = ClassCounts(split.train);
  EXPECT_NEAR(static_cast<double>(tc.at("A")), 40.0, 1.0);
  std::set<std::string> ids;
  for (const auto* part : {&split.train, &split.dev, &split.test}) {
    for (const auto& ex : *part) EXPECT_TRUE(ids.insert(ex.doc.id).second);
  }
  EXPECT_EQ(ids.size(), 100u);
}

TEST(StratifiedSplitTest, DeterministicAndRejectsZeroFractions) {
  const Dataset data = MakeData({{"A", 33}, {"B", 21}});
  const auto x = StratifiedSplit(data, {0.8, 0.1, 0.1}, 1);
  const auto y = StratifiedSplit(data, {0.8, 0.1, 0.1}, 1);
  ASSERT_EQ(x.test.size(), y.test.size());
  for (std::size_t i = 0; i < x.test.size(); ++i) {
    EXPECT_EQ(x.test[i].doc.id, y.test[i].doc.id);
  }
  EXPECT_THROW(StratifiedSplit(data, {1.0, 0.0, 0.0}, 1), ValidationError);
}

TEST(StratifiedSplitTest, TooSmallIsError) {
  EXPECT_THROW(StratifiedSplit(MakeData({{"A", 2}, {"B", 20}}), {0.8, 0.1, 0.1}, 1),
               ValidationError);
}

}  // namespace
}  // namespace offlang
