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

// Soft voting: the weighted mean of member probability rows, argmax with
// ties resolved by class order.

#ifndef OFFLANG_ENSEMBLE_HPP_
#define OFFLANG_ENSEMBLE_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "offlang/common.hpp"
#include "offlang/pipeline.hpp"

namespace offlang {

struct VoteResult {
  Eigen::RowVectorXd probabilities;
  std::size_t label = 0;  // index into the class list
};

// Normalizes weights to sum 1; empty means uniform over `members`. Throws
// ValidationError on a count mismatch, a negative or non-finite weight, or an
// all-zero weight vector.
std::vector<double> NormalizeWeights(const std::vector<double>& weights,
                                     std::size_t members);

// Throws ValidationError on no rows or rows of different lengths.
VoteResult SoftVote(const std::vector<Eigen::RowVectorXd>& member_rows,
                    const std::vector<double>& weights = {});

// Member i's probability matrix is members[i]; all have the same shape.
Matrix SoftVoteMatrix(const std::vector<Matrix>& members,
                      const std::vector<double>& weights = {});

// Text form:
//   member = <pipeline directory>   (one line per member, in order)
//   weights = w1 w2 ...             (optional)
// Relative member paths are resolved against `base_dir`.
struct EnsembleSpec {
  std::vector<std::string> members;
  std::vector<double> weights;
};

EnsembleSpec ReadEnsembleSpec(std::istream& in, const std::string& base_dir = "");
EnsembleSpec ReadEnsembleSpecFile(const std::string& path);
void WriteEnsembleSpec(std::ostream& out, const EnsembleSpec& spec);

class Ensemble {
 public:
  // Throws ValidationError on no members or members with different class
  // lists.
  Ensemble(std::vector<TextPipeline> members, std::vector<double> weights = {});
  static Ensemble Load(const EnsembleSpec& spec);

  const std::vector<std::string>& classes() const;
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return members_.size(); }

  Matrix PredictProba(const std::vector<std::string>& raws, int jobs = 1) const;
  std::vector<std::string> Predict(const std::vector<std::string>& raws,
                                   int jobs = 1) const;

 private:
  std::vector<TextPipeline> members_;
  std::vector<double> weights_;
};

}  // namespace offlang

#endif  // OFFLANG_ENSEMBLE_HPP_
