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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "offlang/classifier.hpp"
#include "offlang/common.hpp"
#include "offlang/forest.hpp"
#include "offlang/linear.hpp"

namespace offlang {
namespace {

struct Data {
  Matrix x;
  std::vector<std::string> y;
};

// Points in [-1, 1]^2 at least `margin` away from both axes, labelled by
// the sign of x1 * x2.
Data Xor(std::size_t n, double margin, std::uint64_t seed) {
  Rng rng(seed);
  Data d{Matrix(n, 2), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double mag = margin + (1.0 - margin) * rng.Uniform();
      d.x(i, j) = rng.Uniform() < 0.5 ? -mag : mag;
    }
    d.y.push_back(d.x(i, 0) * d.x(i, 1) > 0 ? "pos" : "neg");
  }
  return d;
}

// Gaussian-ish blobs around class centres.
Data Blobs(std::size_t n, std::size_t classes, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  Data d{Matrix(n, dim), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    for (std::size_t j = 0; j < dim; ++j) {
      const double centre = (j % classes == c) ? 2.0 : 0.0;
      d.x(i, j) = centre + (rng.Uniform() + rng.Uniform() + rng.Uniform() - 1.5);
    }
    d.y.push_back("c" + std::to_string(c));
  }
  return d;
}

double Accuracy(const ProbabilisticClassifier& m, const Data& d) {
  const auto pred = m.Predict(d.x);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == d.y[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

std::string Serialize(const ProbabilisticClassifier& m) {
  std::ostringstream out;
  m.Save(out);
  return out.str();
}

std::vector<std::unique_ptr<ProbabilisticClassifier>> AllKinds(const Data& d) {
  std::vector<std::unique_ptr<ProbabilisticClassifier>> out;
  ForestConfig fc;
  fc.trees = 20;
  fc.seed = 1;
  out.push_back(TrainRandomForest(d.x, d.y, fc));
  SvmConfig sc;
  sc.seed = 1;
  out.push_back(TrainLinearSvm(d.x, d.y, sc));
  out.push_back(TrainLogistic(d.x, d.y, LogisticConfig{}));
  return out;
}

// ---------------------------------------------------------------------------
// Forest.

TEST(ForestTest, OneClassPredictsCertainty) {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const auto m = TrainRandomForest(x, {"a", "a", "a"}, ForestConfig{});
  const Matrix p = m->PredictProba(Matrix::Constant(4, 1, -7.0));
  ASSERT_EQ(p.cols(), 1);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(p(i, 0), 1.0);
}

TEST(ForestTest, XorIsLearned) {
  const Data d = Xor(200, 0.2, 7);
  ForestConfig config;
  config.trees = 50;
  config.max_depth = 4;
  config.seed = 7;
  const auto m = TrainRandomForest(d.x, d.y, config);
  EXPECT_GE(Accuracy(*m, d), 0.95);
}

// A depth-2 tree splitting at zero on each axis separates the XOR data
// exactly, so a perfect depth-2 solution exists.
TEST(ForestTest, XorIsSeparableAtDepthTwo) {
  const Data d = Xor(200, 0.2, 7);
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    const bool left = d.x(i, 0) <= 0.0;
    const bool low = d.x(i, 1) <= 0.0;
    EXPECT_EQ(d.y[i], left == low ? "pos" : "neg");
  }
}

TEST(ForestTest, IndependentOfJobs) {
  const Data d = Blobs(150, 3, 5, 2);
  ForestConfig config;
  config.trees = 30;
  config.seed = 11;
  config.jobs = 1;
  const std::string one = Serialize(*TrainRandomForest(d.x, d.y, config));
  config.jobs = 8;
  const std::string eight = Serialize(*TrainRandomForest(d.x, d.y, config));
  EXPECT_EQ(one, eight);
}

TEST(ForestTest, StubTreeReturnsLeafDistribution) {
  DecisionTree tree;
  TreeNode leaf;
  leaf.distribution = {0.25, 0.75};
  tree.nodes.push_back(leaf);
  const RandomForest forest({"a", "b"}, 3, ForestConfig{}, {tree});
  const Matrix p = forest.PredictProba(Matrix::Random(5, 3));
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(p(i, 0), 0.25);
    EXPECT_EQ(p(i, 1), 0.75);
  }
}

TEST(ForestTest, NeverBelowMajorityBaseline) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Data d = Blobs(90, 3, 4, seed);
    // Skew the labels so the majority class is not trivial to beat.
    for (std::size_t i = 0; i < d.y.size(); i += 4) d.y[i] = "c0";
    std::map<std::string, std::size_t> counts;
    for (const auto& y : d.y) ++counts[y];
    std::size_t majority = 0;
    for (const auto& [k, n] : counts) majority = std::max(majority, n);
    ForestConfig config;
    config.trees = 15;
    config.seed = seed;
    const auto m = TrainRandomForest(d.x, d.y, config);
    EXPECT_GE(Accuracy(*m, d), static_cast<double>(majority) / d.y.size());
  }
}

TEST(ForestTest, Errors) {
  EXPECT_THROW(TrainRandomForest(Matrix::Ones(1, 2), {"a"}, ForestConfig{}), ValidationError);
  Matrix bad = Matrix::Ones(3, 2);
  bad(1, 1) = INFINITY;
  EXPECT_THROW(TrainRandomForest(bad, {"a", "b", "a"}, ForestConfig{}), ValidationError);
  ForestConfig none;
  none.trees = 0;
  EXPECT_THROW(TrainRandomForest(Matrix::Ones(3, 2), {"a", "b", "a"}, none), ValidationError);
}

// ---------------------------------------------------------------------------
// SVM.

TEST(SvmTest, TwoPointSeparatorIsVerticalAxis) {
  Matrix x(2, 2);
  x << -1, 0, 1, 0;
  SvmConfig config;
  config.lambda = 1e-6;
  config.epochs = 200;
  const auto m = TrainLinearSvm(x, {"class0", "class1"}, config);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Matrix q(1, 2);
    q << -(0.05 + rng.Uniform()), rng.Uniform() * 4 - 2;
    EXPECT_LT(m->DecisionFunction(q)(0, 0), 0.0);
    q(0, 0) = -q(0, 0);
    EXPECT_GT(m->DecisionFunction(q)(0, 0), 0.0);
  }
}

TEST(SvmTest, HingeSubgradientMatchesFiniteDifferences) {
  Rng rng(5);
  int checked = 0;
  while (checked < 10) {
    const Data d = Blobs(20, 2, 3, 100 + checked);
    const Matrix x = AugmentBias(d.x);
    Vector y(20), w(4);
    for (int i = 0; i < 20; ++i) y[i] = d.y[i] == "c1" ? 1.0 : -1.0;
    for (int j = 0; j < 4; ++j) w[j] = rng.Uniform() * 2 - 1;
    const Vector margins = (x * w).cwiseProduct(y);
    if (((margins.array() - 1.0).abs() < 1e-3).any()) continue;  // kink
    Vector g;
    HingeObjective(w, x, y, 0.1, &g);
    const double eps = 1e-7;
    Vector numeric(4);
    for (int j = 0; j < 4; ++j) {
      Vector up = w, down = w;
      up[j] += eps;
      down[j] -= eps;
      numeric[j] = (HingeObjective(up, x, y, 0.1, nullptr) -
                    HingeObjective(down, x, y, 0.1, nullptr)) /
                   (2 * eps);
    }
    EXPECT_LE((g - numeric).norm() / std::max(numeric.norm(), 1e-12), 1e-4);
    ++checked;
  }
}

TEST(SvmTest, PlattIsMonotone) {
  const Data d = Blobs(120, 2, 4, 9);
  const auto m = TrainLinearSvm(d.x, d.y, SvmConfig{});
  const PlattParams& platt = m->machines()[0].platt;
  EXPECT_LE(platt.a, 0.0);
  double prev = -1.0;
  for (double s = -10.0; s <= 10.0; s += 0.25) {
    const double p = platt.Probability(s);
    EXPECT_GE(p, prev);
    prev = p;
  }
  const Matrix scores = m->DecisionFunction(d.x);
  const Matrix proba = m->PredictProba(d.x);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
      if (scores(i, 0) > scores(j, 0)) EXPECT_GE(proba(i, 1), proba(j, 1));
    }
  }
}

TEST(SvmTest, FinalObjectiveNotAboveInitial) {
  const Data d = Blobs(100, 2, 5, 4);
  const auto m = TrainLinearSvm(d.x, d.y, SvmConfig{});
  const auto& obj = m->machines()[0].objective;
  ASSERT_FALSE(obj.empty());
  EXPECT_LE(obj.back(), obj.front());
}

TEST(SvmTest, MulticlassAndErrors) {
  const Data d = Blobs(150, 3, 6, 8);
  const auto m = TrainLinearSvm(d.x, d.y, SvmConfig{});
  EXPECT_EQ(m->machines().size(), 3u);
  EXPECT_GE(Accuracy(*m, d), 0.9);
  EXPECT_THROW(TrainLinearSvm(d.x, std::vector<std::string>(150, "c0"), SvmConfig{}),
               ValidationError);
}

// ---------------------------------------------------------------------------
// Logistic regression.

TEST(LogisticTest, ZeroIterationsIsUniform) {
  const Data d = Blobs(40, 2, 3, 1);
  LogisticConfig config;
  config.max_iterations = 0;
  const auto m = TrainLogistic(d.x, d.y, config);
  const Matrix p = m->PredictProba(d.x);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_EQ(p(i, 0), 0.5);
    EXPECT_EQ(p(i, 1), 0.5);
  }
}

TEST(LogisticTest, GradientMatchesFiniteDifferences) {
  const Data d = Blobs(30, 3, 4, 2);
  const Matrix x = AugmentBias(d.x);
  std::vector<std::string> classes;
  const auto y = EncodeLabels(d.y, classes);
  Rng rng(6);
  Matrix w(3, 5);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.Uniform() - 0.5;
  Matrix g;
  SoftmaxObjective(w, x, y, 0.01, &g);
  const double eps = 1e-6;
  Matrix numeric(3, 5);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Matrix up = w, down = w;
    up.data()[i] += eps;
    down.data()[i] -= eps;
    numeric.data()[i] = (SoftmaxObjective(up, x, y, 0.01, nullptr) -
                         SoftmaxObjective(down, x, y, 0.01, nullptr)) /
                        (2 * eps);
  }
  EXPECT_LE((g - numeric).norm() / numeric.norm(), 1e-6);
}

TEST(LogisticTest, ObjectiveStrictlyDecreases) {
  const Data d = Blobs(80, 2, 3, 3);
  const auto m = TrainLogistic(d.x, d.y, LogisticConfig{});
  const auto& obj = m->objective();
  ASSERT_GE(obj.size(), 2u);
  for (std::size_t i = 1; i < obj.size(); ++i) EXPECT_LT(obj[i], obj[i - 1]) << i;
}

// ---------------------------------------------------------------------------
// Shared contract.

TEST(ClassifierTest, SimplexRowsAndArgmaxConsistency) {
  const Data d = Blobs(90, 3, 4, 5);
  for (const auto& m : AllKinds(d)) {
    Rng rng(static_cast<std::uint64_t>(m->kind()));
    Matrix q(1000, 4);
    for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = (rng.Uniform() - 0.5) * 8;
    const Matrix p = m->PredictProba(q);
    const auto labels = m->Predict(q);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
      EXPECT_GE(p.row(i).minCoeff(), 0.0);
      EXPECT_EQ(labels[i], m->classes()[ArgMax(p.row(i))]);
    }
  }
}

TEST(ClassifierTest, DimensionMismatchIsError) {
  const Data d = Blobs(60, 2, 3, 6);
  for (const auto& m : AllKinds(d)) {
    EXPECT_THROW(m->PredictProba(Matrix::Zero(2, 4)), ValidationError) << ToString(m->kind());
  }
}

TEST(ClassifierTest, SerializationIsBitExact) {
  const Data d = Blobs(60, 3, 3, 7);
  for (const auto& m : AllKinds(d)) {
    const std::string text = Serialize(*m);
    std::istringstream in(text);
    const auto back = ProbabilisticClassifier::Load(in);
    EXPECT_EQ(back->kind(), m->kind());
    EXPECT_EQ(back->classes(), m->classes());
    EXPECT_EQ(back->PredictProba(d.x), m->PredictProba(d.x));
    EXPECT_EQ(Serialize(*back), text);
  }
}

TEST(ClassifierTest, DeterministicRetraining) {
  const Data d = Blobs(60, 2, 3, 8);
  const auto a = AllKinds(d);
  const auto b = AllKinds(d);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(Serialize(*a[i]), Serialize(*b[i]));
}

TEST(ArgMaxTest, TiesGoToFirst) {
  Eigen::RowVectorXd r(3);
  r << 0.4, 0.4, 0.2;
  EXPECT_EQ(ArgMax(r), 0u);
}

TEST(ModelKindTest, Names) {
  for (auto k : {ModelKind::kForest, ModelKind::kSvm, ModelKind::kLogistic}) {
    EXPECT_EQ(ParseModelKind(ToString(k)), k);
  }
  EXPECT_THROW(ParseModelKind("lstm"), ValidationError);
}

}  // namespace
}  // namespace offlang
