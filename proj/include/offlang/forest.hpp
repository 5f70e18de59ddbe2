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

// Random forest of CART trees (Gini impurity, midpoint thresholds).
//
// Tree t draws its bootstrap sample and feature subsets from
// Rng(DeriveSeed(seed, kForestStream, t)), so the forest does not depend on
// how many threads build it. Among equally good splits the lowest feature
// index wins, then the lowest threshold.

#ifndef OFFLANG_FOREST_HPP_
#define OFFLANG_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "offlang/classifier.hpp"

namespace offlang {

struct ForestConfig {
  int trees = 200;
  int max_depth = 0;         // 0: unlimited
  int min_samples_leaf = 1;
  int max_features = 0;      // 0: ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int jobs = 1;              // does not affect the result
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::vector<double> distribution;  // class fractions at a leaf
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  const std::vector<double>& Leaf(const double* row) const;
  int depth() const;
};

class RandomForest : public ProbabilisticClassifier {
 public:
  RandomForest(std::vector<std::string> classes, std::size_t feature_dim,
               ForestConfig config, std::vector<DecisionTree> trees);

  ModelKind kind() const override { return ModelKind::kForest; }
  const ForestConfig& config() const { return config_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  static std::unique_ptr<RandomForest> LoadBody(
      std::istream& in, std::vector<std::string> classes,
      std::size_t feature_dim);

 protected:
  Matrix ProbaImpl(const Matrix& x) const override;
  void SaveBody(std::ostream& out) const override;

 private:
  ForestConfig config_;
  std::vector<DecisionTree> trees_;
};

// `classes` fixes the column order; empty means sorted distinct labels.
// Throws ValidationError on fewer than 2 rows, a row/label count mismatch,
// non-finite features or trees < 1.
std::unique_ptr<RandomForest> TrainRandomForest(
    const Matrix& x, const std::vector<std::string>& y,
    const ForestConfig& config, std::vector<std::string> classes = {});

}  // namespace offlang

#endif  // OFFLANG_FOREST_HPP_
