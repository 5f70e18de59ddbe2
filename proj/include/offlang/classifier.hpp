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

// The prediction contract shared by every trained model: an ordered class
// list, a fixed input dimension and a probability row per input.

#ifndef OFFLANG_CLASSIFIER_HPP_
#define OFFLANG_CLASSIFIER_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "offlang/common.hpp"

namespace offlang {

enum class ModelKind { kForest, kSvm, kLogistic };

ModelKind ParseModelKind(std::string_view name);
std::string_view ToString(ModelKind kind);

class ProbabilisticClassifier {
 public:
  virtual ~ProbabilisticClassifier() = default;

  virtual ModelKind kind() const = 0;
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t feature_dim() const { return feature_dim_; }

  // Rows are on the probability simplex. Throws ValidationError when the
  // column count differs from feature_dim() or an input is non-finite.
  Matrix PredictProba(const Matrix& x) const;
  // Argmax of each probability row; ties go to the earlier class.
  std::vector<std::string> Predict(const Matrix& x) const;

  // Versioned text container; doubles are written exactly, so a loaded model
  // predicts bit-identically.
  void Save(std::ostream& out) const;
  void SaveFile(const std::string& path) const;
  static std::unique_ptr<ProbabilisticClassifier> Load(std::istream& in);
  static std::unique_ptr<ProbabilisticClassifier> LoadFile(
      const std::string& path);

 protected:
  ProbabilisticClassifier(std::vector<std::string> classes,
                          std::size_t feature_dim);

  virtual Matrix ProbaImpl(const Matrix& x) const = 0;
  virtual void SaveBody(std::ostream& out) const = 0;

 private:
  std::vector<std::string> classes_;
  std::size_t feature_dim_;
};

// Index of the largest entry; the first one on ties.
std::size_t ArgMax(const Eigen::Ref<const Eigen::RowVectorXd>& row);

// Maps labels to indices of `classes`. When `classes` is empty it is filled
// with the sorted distinct labels. Throws ValidationError on an unknown label.
std::vector<std::size_t> EncodeLabels(const std::vector<std::string>& y,
                                      std::vector<std::string>& classes);

// Throws ValidationError if any entry is non-finite.
void CheckFinite(const Matrix& x);

// Per-column standardization learned on training data; constant columns keep
// scale 1.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer Fit(const Matrix& x);
  Matrix Apply(const Matrix& x) const;
  void Save(std::ostream& out) const;
  static Standardizer Load(std::istream& in);
};

// Line-oriented helpers for model bodies.
void WriteVector(std::ostream& out, std::string_view key, const Vector& v);
Vector ReadVector(std::istream& in, std::string_view key);
void WriteScalar(std::ostream& out, std::string_view key, double v);
double ReadScalar(std::istream& in, std::string_view key);
std::string ReadField(std::istream& in, std::string_view key);

}  // namespace offlang

#endif  // OFFLANG_CLASSIFIER_HPP_
