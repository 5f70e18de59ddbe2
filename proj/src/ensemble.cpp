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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "offlang/classifier.hpp"

namespace offlang {

std::vector<double> NormalizeWeights(const std::vector<double>& weights,
                                     std::size_t members) {
  if (members == 0) throw ValidationError("ensemble has no members");
  if (weights.empty()) return std::vector<double>(members, 1.0 / members);
  if (weights.size() != members) {
    throw ValidationError("ensemble has " + std::to_string(members) +
                          " members but " + std::to_string(weights.size()) +
                          " weights");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0) {
      throw ValidationError("ensemble weights must be finite and >= 0");
    }
    sum += w;
  }
  if (sum <= 0) throw ValidationError("ensemble weights sum to zero");
  std::vector<double> out(weights);
  for (double& w : out) w /= sum;
  return out;
}

VoteResult SoftVote(const std::vector<Eigen::RowVectorXd>& member_rows,
                    const std::vector<double>& weights) {
  const std::vector<double> w = NormalizeWeights(weights, member_rows.size());
  VoteResult out;
  out.probabilities = Eigen::RowVectorXd::Zero(member_rows.front().size());
  for (std::size_t m = 0; m < member_rows.size(); ++m) {
    if (member_rows[m].size() != out.probabilities.size()) {
      throw ValidationError("ensemble members disagree on the class count");
    }
    out.probabilities += w[m] * member_rows[m];
  }
  out.label = ArgMax(out.probabilities);
  return out;
}

Matrix SoftVoteMatrix(const std::vector<Matrix>& members,
                      const std::vector<double>& weights) {
  const std::vector<double> w = NormalizeWeights(weights, members.size());
  Matrix out = Matrix::Zero(members.front().rows(), members.front().cols());
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (members[m].rows() != out.rows() || members[m].cols() != out.cols()) {
      throw ValidationError("ensemble member outputs differ in shape");
    }
    out += w[m] * members[m];
  }
  return out;
}

EnsembleSpec ReadEnsembleSpec(std::istream& in, const std::string& base_dir) {
  EnsembleSpec spec;
  bool have_weights = false;
  for (const auto& [key, value] : ReadKeyValues(in)) {
    if (key == "member") {
      std::filesystem::path p(value);
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      spec.members.push_back(p.string());
    } else if (key == "weights") {
      if (have_weights) throw ValidationError("weights given twice");
      have_weights = true;
      for (const auto& cell : SplitString(value, ' ')) {
        if (cell.empty()) continue;
        char* end = nullptr;
        const double w = std::strtod(cell.c_str(), &end);
        if (*end != '\0') throw ValidationError("bad weight '" + cell + "'");
        spec.weights.push_back(w);
      }
    } else {
      throw ValidationError("unknown ensemble key '" + key + "'");
    }
  }
  if (spec.members.empty()) throw ValidationError("ensemble spec has no members");
  NormalizeWeights(spec.weights, spec.members.size());
  return spec;
}

EnsembleSpec ReadEnsembleSpecFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open ensemble spec '" + path + "'");
  return ReadEnsembleSpec(in, std::filesystem::path(path).parent_path().string());
}

void WriteEnsembleSpec(std::ostream& out, const EnsembleSpec& spec) {
  for (const auto& m : spec.members) out << "member = " << m << '\n';
  if (!spec.weights.empty()) {
    out << "weights =";
    for (double w : spec.weights) out << ' ' << FormatExact(w);
    out << '\n';
  }
}

Ensemble::Ensemble(std::vector<TextPipeline> members, std::vector<double> weights)
    : members_(std::move(members)),
      weights_(NormalizeWeights(weights, members_.size())) {
  for (const auto& m : members_) {
    if (m.classes() != members_.front().classes()) {
      throw ValidationError("ensemble members have different class lists");
    }
  }
}

Ensemble Ensemble::Load(const EnsembleSpec& spec) {
  std::vector<TextPipeline> members;
  for (const auto& path : spec.members) members.push_back(TextPipeline::Load(path));
  return Ensemble(std::move(members), spec.weights);
}

const std::vector<std::string>& Ensemble::classes() const {
  return members_.front().classes();
}

Matrix Ensemble::PredictProba(const std::vector<std::string>& raws,
                              int jobs) const {
  std::vector<Matrix> outputs;
  outputs.reserve(members_.size());
  for (const auto& m : members_) outputs.push_back(m.PredictProba(raws, jobs));
  return SoftVoteMatrix(outputs, weights_);
}

std::vector<std::string> Ensemble::Predict(const std::vector<std::string>& raws,
                                           int jobs) const {
  const Matrix p = PredictProba(raws, jobs);
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) out.push_back(classes()[ArgMax(p.row(i))]);
  return out;
}

}  // namespace offlang
