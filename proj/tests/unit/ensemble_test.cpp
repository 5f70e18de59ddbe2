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

#include "offlang/ensemble.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "offlang/common.hpp"

namespace offlang {
namespace {

Eigen::RowVectorXd Row(std::initializer_list<double> v) {
  Eigen::RowVectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

Eigen::RowVectorXd RandomSimplexRow(Rng& rng, Eigen::Index k) {
  Eigen::RowVectorXd r(k);
  for (Eigen::Index i = 0; i < k; ++i) r[i] = rng.Uniform() + 1e-3;
  return r / r.sum();
}

TEST(SoftVoteTest, Examples) {
  const auto one = SoftVote({Row({0.1, 0.7, 0.2})});
  EXPECT_EQ(one.probabilities, Row({0.1, 0.7, 0.2}));
  EXPECT_EQ(one.label, 1u);

  const auto two = SoftVote({Row({0.6, 0.4}), Row({0.2, 0.8})});
  EXPECT_NEAR(two.probabilities[0], 0.4, 1e-15);
  EXPECT_NEAR(two.probabilities[1], 0.6, 1e-15);
  EXPECT_EQ(two.label, 1u);

  const auto tie = SoftVote({Row({0.7, 0.3}), Row({0.3, 0.7})});
  EXPECT_EQ(tie.probabilities, Row({0.5, 0.5}));
  EXPECT_EQ(tie.label, 0u);
}

TEST(SoftVoteTest, Errors) {
  EXPECT_THROW(SoftVote({}), ValidationError);
  EXPECT_THROW(SoftVote({Row({0.5, 0.5}), Row({1.0})}), ValidationError);
  EXPECT_THROW(SoftVote({Row({0.5, 0.5})}, {1.0, 2.0}), ValidationError);
  EXPECT_THROW(SoftVote({Row({0.5, 0.5})}, {-1.0}), ValidationError);
  EXPECT_THROW(SoftVote({Row({0.5, 0.5}), Row({0.5, 0.5})}, {0.0, 0.0}), ValidationError);
}

TEST(SoftVoteTest, RandomProperties) {
  Rng rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + rng.Index(5);
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.Index(4));
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> weights;
    for (std::size_t i = 0; i < m; ++i) {
      rows.push_back(RandomSimplexRow(rng, k));
      weights.push_back(rng.Uniform() + 0.01);
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    Eigen::RowVectorXd want = Eigen::RowVectorXd::Zero(k);
    for (std::size_t i = 0; i < m; ++i) want += (weights[i] / total) * rows[i];

    const VoteResult got = SoftVote(rows, weights);
    ASSERT_LE((got.probabilities - want).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_NEAR(got.probabilities.sum(), 1.0, 1e-12);
    ASSERT_GE(got.probabilities.minCoeff(), 0.0);
    Eigen::Index best;
    got.probabilities.maxCoeff(&best);
    ASSERT_EQ(got.label, static_cast<std::size_t>(best));

    // Permuting members (with their weights) leaves the row unchanged.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    std::vector<Eigen::RowVectorXd> prow;
    std::vector<double> pw;
    for (auto i : order) {
      prow.push_back(rows[i]);
      pw.push_back(weights[i]);
    }
    ASSERT_LE((SoftVote(prow, pw).probabilities - got.probabilities).cwiseAbs().maxCoeff(),
              1e-12);

    // A one-hot weight vector selects that member exactly.
    std::vector<double> hot(m, 0.0);
    hot[0] = 1.0;
    ASSERT_EQ(SoftVote(rows, hot).probabilities, rows[0]);
  }
}

TEST(SoftVoteMatrixTest, RowwiseAgreesWithSoftVote) {
  Rng rng(3);
  std::vector<Matrix> members(3, Matrix(4, 3));
  for (auto& m : members) {
    for (Eigen::Index i = 0; i < 4; ++i) m.row(i) = RandomSimplexRow(rng, 3);
  }
  const Matrix out = SoftVoteMatrix(members, {1, 2, 3});
  for (Eigen::Index i = 0; i < 4; ++i) {
    std::vector<Eigen::RowVectorXd> rows;
    for (const auto& m : members) rows.push_back(m.row(i));
    EXPECT_LE((out.row(i) - SoftVote(rows, {1, 2, 3}).probabilities).cwiseAbs().maxCoeff(),
              1e-15);
  }
}

TEST(NormalizeWeightsTest, DefaultsToUniform) {
  EXPECT_EQ(NormalizeWeights({}, 4), std::vector<double>(4, 0.25));
  const auto w = NormalizeWeights({1, 3}, 2);
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);
}

TEST(EnsembleSpecTest, ParseResolveAndWrite) {
  std::istringstream in(
      "# members\nmember = rf\nmember = /abs/svm\nweights = 2 1\n");
  const EnsembleSpec spec = ReadEnsembleSpec(in, "/base");
  EXPECT_EQ(spec.members, (std::vector<std::string>{"/base/rf", "/abs/svm"}));
  EXPECT_EQ(spec.weights, (std::vector<double>{2, 1}));
  std::stringstream buf;
  WriteEnsembleSpec(buf, spec);
  const EnsembleSpec back = ReadEnsembleSpec(buf);
  EXPECT_EQ(back.members, spec.members);
  EXPECT_EQ(back.weights, spec.weights);

  std::istringstream bad("model = x\n");
  EXPECT_ANY_THROW(ReadEnsembleSpec(bad));
}

}  // namespace
}  // namespace offlang
