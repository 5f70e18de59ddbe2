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

// Linear models over standardized inputs.
//
// LinearSvm: L2-regularized hinge loss, Pegasos subgradient steps over
// seeded epoch shuffles with step 1 / (lambda * (t + 1 / lambda)), bias
// folded in as a constant extra input. Scores become probabilities through a Platt sigmoid fitted on out-of-fold scores.
// More than two classes are handled one-vs-rest and renormalized.
//
// LogisticRegression: multinomial log-loss with an L2 penalty on the
// non-bias weights, full-batch gradient descent with backtracking.

#ifndef OFFLANG_LINEAR_HPP_
#define OFFLANG_LINEAR_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "offlang/classifier.hpp"

namespace offlang {

// Appends a constant 1 column.
Matrix AugmentBias(const Matrix& x);

// lambda/2 |w|^2 + mean_i max(0, 1 - y_i w.x_i), labels y_i in {-1, +1}.
// `grad` receives a subgradient (0 at the kink).
double HingeObjective(const Vector& w, const Matrix& x, const Vector& y,
                      double lambda, Vector* grad);

struct PlattParams {
  double a = 0.0;
  double b = 0.0;

  // 1 / (1 + exp(a * score + b)).
  double Probability(double score) const;
};

// Newton fit with regularized targets; `positive[i]` is the label of
// scores[i]. The slope is clamped to a <= 0 so probability never falls as the
// score rises.
PlattParams FitPlatt(const std::vector<double>& scores,
                     const std::vector<bool>& positive);

struct SvmConfig {
  double lambda = 1e-3;
  int epochs = 30;
  int calibration_folds = 5;
  std::uint64_t seed = 0;
  int jobs = 1;  // does not affect the result
};

struct BinarySvm {
  Vector w;  // over standardized inputs plus bias
  PlattParams platt;
  std::vector<double> objective;  // after each epoch
};

// Trains on augmented inputs with labels in {-1, +1}; no calibration.
BinarySvm TrainBinarySvm(const Matrix& x_aug, const Vector& y,
                         const SvmConfig& config, std::uint64_t stream);

class LinearSvm : public ProbabilisticClassifier {
 public:
  LinearSvm(std::vector<std::string> classes, std::size_t feature_dim,
            SvmConfig config, Standardizer standardizer,
            std::vector<BinarySvm> machines);

  ModelKind kind() const override { return ModelKind::kSvm; }
  // Raw scores, one column per machine (1 for binary problems).
  Matrix DecisionFunction(const Matrix& x) const;
  const std::vector<BinarySvm>& machines() const { return machines_; }

  static std::unique_ptr<LinearSvm> LoadBody(std::istream& in,
                                             std::vector<std::string> classes,
                                             std::size_t feature_dim);

 protected:
  Matrix ProbaImpl(const Matrix& x) const override;
  void SaveBody(std::ostream& out) const override;

 private:
  SvmConfig config_;
  Standardizer standardizer_;
  std::vector<BinarySvm> machines_;
};

// Throws ValidationError on a single class, mismatched sizes or non-finite
// features.
std::unique_ptr<LinearSvm> TrainLinearSvm(const Matrix& x,
                                          const std::vector<std::string>& y,
                                          const SvmConfig& config,
                                          std::vector<std::string> classes = {});

// mean_i -log softmax(W x_i)[y_i] + l2/2 |W without bias column|^2, for W of
// shape classes x (d + 1) and augmented x.
double SoftmaxObjective(const Matrix& w, const Matrix& x_aug,
                        const std::vector<std::size_t>& y, double l2,
                        Matrix* grad);

struct LogisticConfig {
  double l2 = 1e-4;
  int max_iterations = 300;
  double tolerance = 1e-10;  // stop when the objective improves less
};

class LogisticRegression : public ProbabilisticClassifier {
 public:
  LogisticRegression(std::vector<std::string> classes, std::size_t feature_dim,
                     LogisticConfig config, Standardizer standardizer,
                     Matrix weights, std::vector<double> objective);

  ModelKind kind() const override { return ModelKind::kLogistic; }
  const Matrix& weights() const { return weights_; }
  // Objective value before training and after each iteration.
  const std::vector<double>& objective() const { return objective_; }

  static std::unique_ptr<LogisticRegression> LoadBody(
      std::istream& in, std::vector<std::string> classes,
      std::size_t feature_dim);

 protected:
  Matrix ProbaImpl(const Matrix& x) const override;
  void SaveBody(std::ostream& out) const override;

 private:
  LogisticConfig config_;
  Standardizer standardizer_;
  Matrix weights_;
  std::vector<double> objective_;
};

std::unique_ptr<LogisticRegression> TrainLogistic(
    const Matrix& x, const std::vector<std::string>& y,
    const LogisticConfig& config, std::vector<std::string> classes = {});

}  // namespace offlang

#endif  // OFFLANG_LINEAR_HPP_
