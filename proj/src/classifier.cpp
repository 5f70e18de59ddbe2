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

#include "offlang/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "offlang/corpus.hpp"
#include "offlang/forest.hpp"
#include "offlang/linear.hpp"

namespace offlang {
namespace {

constexpr std::string_view kModelMagic = "offlang-model";
constexpr int kModelVersion = 1;

}  // namespace

ModelKind ParseModelKind(std::string_view name) {
  if (name == "forest") return ModelKind::kForest;
  if (name == "svm") return ModelKind::kSvm;
  if (name == "logreg" || name == "logistic") return ModelKind::kLogistic;
  throw ValidationError("unknown model kind '" + std::string(name) +
                        "' (expected forest, svm or logreg)");
}

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kForest:
      return "forest";
    case ModelKind::kSvm:
      return "svm";
    case ModelKind::kLogistic:
      return "logreg";
  }
  return "forest";
}

ProbabilisticClassifier::ProbabilisticClassifier(
    std::vector<std::string> classes, std::size_t feature_dim)
    : classes_(std::move(classes)), feature_dim_(feature_dim) {
  if (classes_.empty()) throw ValidationError("classifier without classes");
}

Matrix ProbabilisticClassifier::PredictProba(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != feature_dim_) {
    throw ValidationError("input has " + std::to_string(x.cols()) +
                          " features, model expects " +
                          std::to_string(feature_dim_));
  }
  CheckFinite(x);
  return ProbaImpl(x);
}

std::vector<std::string> ProbabilisticClassifier::Predict(
    const Matrix& x) const {
  const Matrix p = PredictProba(x);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.push_back(classes_[ArgMax(p.row(i))]);
  }
  return out;
}

void ProbabilisticClassifier::Save(std::ostream& out) const {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "kind " << ToString(kind()) << '\n';
  std::vector<std::string> escaped;
  for (const auto& c : classes_) escaped.push_back(EscapeField(c));
  out << "classes " << JoinStrings(escaped, "\t") << '\n';
  out << "dim " << feature_dim_ << '\n';
  SaveBody(out);
}

void ProbabilisticClassifier::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  Save(out);
}

std::unique_ptr<ProbabilisticClassifier> ProbabilisticClassifier::Load(
    std::istream& in) {
  const std::string version = ReadField(in, kModelMagic);
  if (version != std::to_string(kModelVersion)) {
    throw ParseError("unsupported model version '" + version + "'");
  }
  const ModelKind kind = ParseModelKind(ReadField(in, "kind"));
  std::vector<std::string> classes;
  for (const auto& c : SplitString(ReadField(in, "classes"), '\t')) {
    classes.push_back(UnescapeField(c));
  }
  const std::size_t dim = std::stoul(ReadField(in, "dim"));
  switch (kind) {
    case ModelKind::kForest:
      return RandomForest::LoadBody(in, std::move(classes), dim);
    case ModelKind::kSvm:
      return LinearSvm::LoadBody(in, std::move(classes), dim);
    case ModelKind::kLogistic:
      return LogisticRegression::LoadBody(in, std::move(classes), dim);
  }
  throw ParseError("unknown model kind");
}

std::unique_ptr<ProbabilisticClassifier> ProbabilisticClassifier::LoadFile(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model '" + path + "'");
  return Load(in);
}

std::size_t ArgMax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::size_t best = 0;
  for (Eigen::Index j = 1; j < row.size(); ++j) {
    if (row(j) > row(static_cast<Eigen::Index>(best))) {
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

std::vector<std::size_t> EncodeLabels(const std::vector<std::string>& y,
                                      std::vector<std::string>& classes) {
  if (classes.empty()) {
    classes = y;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!index.emplace(classes[i], i).second) {
      throw ValidationError("duplicate class '" + classes[i] + "'");
    }
  }
  std::vector<std::size_t> out;
  out.reserve(y.size());
  for (const auto& label : y) {
    const auto it = index.find(label);
    if (it == index.end()) {
      throw ValidationError("label '" + label + "' is not a declared class");
    }
    out.push_back(it->second);
  }
  return out;
}

void CheckFinite(const Matrix& x) {
  if (!x.allFinite()) throw ValidationError("non-finite feature value");
}

Standardizer Standardizer::Fit(const Matrix& x) {
  Standardizer s;
  const double n = static_cast<double>(std::max<Eigen::Index>(x.rows(), 1));
  s.mean = x.colwise().sum().transpose() / n;
  s.scale = Vector::Ones(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    if (var > 1e-24) s.scale(j) = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix& x) const {
  Matrix out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

void Standardizer::Save(std::ostream& out) const {
  WriteVector(out, "mean", mean);
  WriteVector(out, "scale", scale);
}

Standardizer Standardizer::Load(std::istream& in) {
  Standardizer s;
  s.mean = ReadVector(in, "mean");
  s.scale = ReadVector(in, "scale");
  if (s.mean.size() != s.scale.size()) {
    throw ParseError("standardizer size mismatch");
  }
  return s;
}

void WriteVector(std::ostream& out, std::string_view key, const Vector& v) {
  out << key << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << FormatExact(v(i));
  out << '\n';
}

Vector ReadVector(std::istream& in, std::string_view key) {
  const auto cells = SplitString(ReadField(in, key), ' ');
  if (cells.empty()) throw ParseError("missing vector size for '" + std::string(key) + "'");
  const std::size_t n = std::stoul(cells[0]);
  if (cells.size() != n + 1) {
    throw ParseError("vector '" + std::string(key) + "' has wrong length");
  }
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(i) = ParseExact(cells[i + 1]);
  return v;
}

void WriteScalar(std::ostream& out, std::string_view key, double v) {
  out << key << ' ' << FormatExact(v) << '\n';
}

double ReadScalar(std::istream& in, std::string_view key) {
  return ParseExact(ReadField(in, key));
}

std::string ReadField(std::istream& in, std::string_view key) {
  std::string line;
  if (!ReadLine(in, line)) {
    throw ParseError("model file truncated before '" + std::string(key) + "'");
  }
  if (line.size() < key.size() || line.compare(0, key.size(), key) != 0 ||
      (line.size() > key.size() && line[key.size()] != ' ')) {
    throw ParseError("expected '" + std::string(key) + "', got '" +
                     line.substr(0, 40) + "'");
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

}  // namespace offlang
