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

// Ablation grid: train and score one pipeline per (model, base vectorizer,
// feature blocks, sampling mode) cell on a shared split.

#ifndef OFFLANG_ABLATION_HPP_
#define OFFLANG_ABLATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "offlang/pipeline.hpp"

namespace offlang {

struct AblationGrid {
  std::vector<ModelKind> models = {ModelKind::kForest};
  std::vector<BaseVectorizer> bases = {BaseVectorizer::kTfidf,
                                       BaseVectorizer::kEmbedding};
  std::vector<bool> features = {false, true};
  std::vector<SamplingMode> samplings = {SamplingMode::kBalanced};
  // Rerun the best cell on unnormalized text.
  bool normalization_comparison = true;
};

// Parses comma-separated lists, e.g. "forest,svm".
std::vector<ModelKind> ParseModelList(std::string_view text);
std::vector<BaseVectorizer> ParseBaseList(std::string_view text);
std::vector<SamplingMode> ParseSamplingList(std::string_view text);
std::vector<bool> ParseFeatureList(std::string_view text);  // "on,off"

struct AblationCell {
  PipelineOptions options;  // complete config; retraining reproduces the cell
  double macro_f1 = 0.0;
  std::string error;  // non-empty when the cell failed

  bool ok() const { return error.empty(); }
  bool features() const;
  // RF, RF+F, RF+U, RF+U+F; "-T" marks cells without a base vectorizer.
  std::string Label() const;
};

struct AblationReport {
  std::vector<AblationCell> cells;
  // Best successful cell and its rerun with normalization disabled.
  std::vector<AblationCell> normalization;
  bool partial = false;
};

PipelineOptions CellOptions(const PipelineOptions& base, ModelKind model,
                            BaseVectorizer vectorizer, bool features,
                            SamplingMode sampling);

// Trains on split.train and scores on split.test. Failing cells are recorded
// and the grid continues.
AblationCell RunCell(const PipelineOptions& options, const DatasetSplit& split,
                     const PipelineResources& resources, int jobs);
AblationReport RunAblation(const AblationGrid& grid, const DatasetSplit& split,
                           const PipelineOptions& base,
                           const PipelineResources& resources, int jobs = 1);

// Rows are cell labels, columns sampling modes; failed cells print "error".
void WriteAblationMatrix(std::ostream& out, const AblationReport& report);
// One block per cell: header fields followed by the full option list.
void WriteAblationDetail(std::ostream& out, const AblationReport& report);

}  // namespace offlang

#endif  // OFFLANG_ABLATION_HPP_
