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

#include "offlang/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "offlang/common.hpp"

namespace offlang {
namespace {

using Labels = std::vector<std::string>;

// Confusion-count oracle written independently of the library.
double BruteMacroF1(const Labels& truth, const Labels& pred, const Labels& classes) {
  double sum = 0.0;
  for (const auto& c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      if (pred[i] == c && truth[i] != c) ++fp;
      if (pred[i] != c && truth[i] == c) ++fn;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return sum / static_cast<double>(classes.size());
}

// Fleiss' formulas evaluated directly from their definition.
double HandFleiss(const std::vector<std::vector<std::size_t>>& m) {
  const double items = static_cast<double>(m.size());
  const double n = static_cast<double>(std::accumulate(m[0].begin(), m[0].end(), 0ul));
  std::vector<double> pj(m[0].size(), 0.0);
  double pbar = 0.0;
  for (const auto& row : m) {
    double agree = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      agree += static_cast<double>(row[j]) * (static_cast<double>(row[j]) - 1.0);
      pj[j] += static_cast<double>(row[j]);
    }
    pbar += agree / (n * (n - 1.0));
  }
  pbar /= items;
  double pe = 0.0;
  for (double p : pj) pe += (p / (items * n)) * (p / (items * n));
  return (pbar - pe) / (1.0 - pe);
}

TEST(MacroF1Test, Examples) {
  EXPECT_EQ(MacroF1({"A", "B", "A"}, {"A", "B", "A"}, {"A", "B"}).macro_f1, 1.0);
  const auto r = MacroF1({"A", "A", "B"}, {"A", "B", "A"}, {"A", "B"});
  EXPECT_DOUBLE_EQ(r.per_class[0].f1, 0.5);
  EXPECT_EQ(r.per_class[1].f1, 0.0);
  EXPECT_DOUBLE_EQ(r.macro_f1, 0.25);
  EXPECT_EQ(MacroF1({"A", "A"}, {"B", "B"}, {"A", "B"}).macro_f1, 0.0);
}

TEST(MacroF1Test, AbsentClassScoresZero) {
  const auto r = MacroF1({"A", "B"}, {"A", "B"}, {"A", "B", "C"});
  EXPECT_DOUBLE_EQ(r.macro_f1, 2.0 / 3.0);
  EXPECT_EQ(r.per_class[2].support, 0u);
}

TEST(MacroF1Test, Errors) {
  EXPECT_THROW(MacroF1({"A"}, {"A", "B"}, {"A", "B"}), ValidationError);
  EXPECT_THROW(MacroF1({"A"}, {"Z"}, {"A", "B"}), ValidationError);
}

TEST(MacroF1Test, MatchesBruteForceOracle) {
  Rng rng(2026);
  const Labels all = {"A", "B", "C", "D", "E"};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng.Index(5);
    const Labels classes(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    const std::size_t n = 1 + rng.Index(40);
    Labels truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = classes[rng.Index(k)];
      pred[i] = classes[rng.Index(k)];
    }
    const auto r = MacroF1(truth, pred, classes);
    ASSERT_NEAR(r.macro_f1, BruteMacroF1(truth, pred, classes), 1e-12);
    std::size_t total = 0;
    for (const auto& row : r.confusion) total = std::accumulate(row.begin(), row.end(), total);
    ASSERT_EQ(total, n);
    double mean = 0.0;
    for (const auto& s : r.per_class) mean += s.f1;
    ASSERT_NEAR(r.macro_f1, mean / static_cast<double>(k), 1e-15);
  }
}

TEST(MacroF1Test, ConsistentRelabelingIsInvariant) {
  Rng rng(9);
  const Labels classes = {"A", "B", "C"};
  const std::map<std::string, std::string> perm = {{"A", "C"}, {"B", "A"}, {"C", "B"}};
  for (int trial = 0; trial < 100; ++trial) {
    Labels truth(20), pred(20), t2(20), p2(20);
    for (std::size_t i = 0; i < 20; ++i) {
      truth[i] = classes[rng.Index(3)];
      pred[i] = classes[rng.Index(3)];
      t2[i] = perm.at(truth[i]);
      p2[i] = perm.at(pred[i]);
    }
    EXPECT_NEAR(MacroF1(truth, pred, classes).macro_f1, MacroF1(t2, p2, classes).macro_f1,
                1e-15);
  }
}

TEST(FleissTest, Examples) {
  EXPECT_EQ(FleissKappa({{3, 0}, {0, 3}, {3, 0}}).kappa, 1.0);
  const auto r = FleissKappa({{2, 0}, {1, 1}});
  EXPECT_NEAR(r.kappa, -1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.observed, 0.5);
  EXPECT_DOUBLE_EQ(r.expected, 0.625);
  EXPECT_EQ(r.raters, 2u);
  EXPECT_EQ(r.items, 2u);
  EXPECT_EQ(FleissKappa({{4, 0}, {4, 0}}).kappa, 1.0);  // one category used
}

TEST(FleissTest, Errors) {
  EXPECT_THROW(FleissKappa({}), ValidationError);
  EXPECT_THROW(FleissKappa({{2, 0}, {1, 2}}), ValidationError);
  EXPECT_THROW(FleissKappa({{1, 0}, {0, 1}}), ValidationError);
}

std::vector<std::vector<std::size_t>> RandomRatings(Rng& rng) {
  const std::size_t items = 2 + rng.Index(20);
  const std::size_t cats = 2 + rng.Index(4);
  const std::size_t raters = 2 + rng.Index(6);
  std::vector<std::vector<std::size_t>> m(items, std::vector<std::size_t>(cats, 0));
  for (auto& row : m) {
    for (std::size_t r = 0; r < raters; ++r) ++row[rng.Index(cats)];
  }
  return m;
}

TEST(FleissTest, MatchesHandFormula) {
  Rng rng(77);
  int checked = 0;
  while (checked < 100) {
    const auto m = RandomRatings(rng);
    std::vector<std::size_t> used(m[0].size(), 0);
    for (const auto& row : m) {
      for (std::size_t j = 0; j < row.size(); ++j) used[j] += row[j];
    }
    if (std::count_if(used.begin(), used.end(), [](auto u) { return u > 0; }) < 2) continue;
    EXPECT_NEAR(FleissKappa(m).kappa, HandFleiss(m), 1e-9);
    ++checked;
  }
}

TEST(FleissTest, DuplicationAndCategoryPermutationInvariance) {
  Rng rng(78);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = RandomRatings(rng);
    const double k = FleissKappa(m).kappa;
    auto doubled = m;
    doubled.insert(doubled.end(), m.begin(), m.end());
    EXPECT_NEAR(FleissKappa(doubled).kappa, k, 1e-12);
    auto permuted = m;
    for (auto& row : permuted) std::reverse(row.begin(), row.end());
    EXPECT_NEAR(FleissKappa(permuted).kappa, k, 1e-12);
  }
}

TEST(CohenTest, Examples) {
  EXPECT_EQ(CohenKappa({"A", "B", "A"}, {"A", "B", "A"}).kappa, 1.0);
  const auto r = CohenKappa({"A", "A", "B", "B"}, {"A", "B", "A", "B"});
  EXPECT_DOUBLE_EQ(r.observed, 0.5);
  EXPECT_DOUBLE_EQ(r.expected, 0.5);
  EXPECT_EQ(r.kappa, 0.0);
  EXPECT_EQ(CohenKappa({"A", "B", "A", "B"}, {"A", "A", "A", "A"}).kappa, 0.0);
  EXPECT_THROW(CohenKappa({"A"}, {"A", "B"}), ValidationError);
}

TEST(EvalReportTest, WritesPerClassRows) {
  std::ostringstream out;
  WriteEvalReport(out, MacroF1({"A", "A", "B"}, {"A", "B", "A"}, {"A", "B"}));
  EXPECT_NE(out.str().find("0.250000"), std::string::npos);
}

}  // namespace
}  // namespace offlang
