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

// Dataset ingestion, task label schemas, stratified splitting and class
// re-balancing.
//
// Two on-disk formats are supported:
//
//   OLID TSV      header `id<TAB>tweet<TAB>subtask_a<TAB>subtask_b<TAB>subtask_c`,
//                 `NULL` marks an absent label.
//   internal TSV  `id<TAB>label<TAB>text`, where label is a slash-separated
//                 path through the hierarchy (`OFF`, `OFF/TIN/IND`, `HATE`)
//                 or `-` for unlabeled text. Tabs, newlines and backslashes
//                 inside text are written as `\t`, `\n` and `\\`.

#ifndef OFFLANG_CORPUS_HPP_
#define OFFLANG_CORPUS_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace offlang {

enum class OffenseLabel { kOff, kNot };
enum class TargetingLabel { kTin, kUnt };
enum class TargetLabel { kInd, kGrp, kOth };
enum class HateLabel { kHate, kNoHate };

std::string_view ToString(OffenseLabel l);
std::string_view ToString(TargetingLabel l);
std::string_view ToString(TargetLabel l);
std::string_view ToString(HateLabel l);

struct LabeledDocument {
  std::string id;
  std::string raw_text;
  std::optional<OffenseLabel> label_a;
  std::optional<TargetingLabel> label_b;
  std::optional<TargetLabel> label_c;
  std::optional<HateLabel> label_hate;
  std::string source;

  friend bool operator==(const LabeledDocument&,
                         const LabeledDocument&) = default;
};

// Throws ValidationError if the label hierarchy is broken or the text is
// blank.
void ValidateDocument(const LabeledDocument& doc);

std::vector<LabeledDocument> ParseOlid(std::istream& in);
void WriteOlid(std::ostream& out, const std::vector<LabeledDocument>& docs);

std::vector<LabeledDocument> ParseInternalTsv(std::istream& in,
                                              std::string_view source = "tsv");
void WriteInternalTsv(std::ostream& out,
                      const std::vector<LabeledDocument>& docs);

// Reads either format, deciding by the first line.
std::vector<LabeledDocument> ReadCorpusFile(const std::string& path);

std::string EscapeField(std::string_view text);
std::string UnescapeField(std::string_view text);

// ---------------------------------------------------------------------------
// Tasks. Each task selects one label column as the prediction target.

enum class Task { k5A, k6A, k6B, k6C };

Task ParseTask(std::string_view name);
std::string_view ToString(Task task);
// Class order used for probability columns and tie-breaking.
const std::vector<std::string>& TaskClasses(Task task);
std::optional<std::string> TargetLabelOf(const LabeledDocument& doc, Task task);

struct Example {
  LabeledDocument doc;
  std::string label;
};
using Dataset = std::vector<Example>;

// Keeps the documents that carry a label for `task`.
Dataset MakeTaskDataset(const std::vector<LabeledDocument>& docs, Task task);
std::map<std::string, std::size_t> ClassCounts(const Dataset& data);

// ---------------------------------------------------------------------------
// Sampling.

enum class SamplingMode {
  kBalanced,    // downsample the majority, then oversample to balance
  kFull,        // oversample only
  kUnbalanced,  // leave the data as is
};

SamplingMode ParseSamplingMode(std::string_view name);
std::string_view ToString(SamplingMode mode);

struct SamplingPlan {
  std::map<std::string, std::size_t> targets;
  double max_ratio = 2.0;
  std::uint64_t seed = 0;
  bool unbalanced = false;
};

// Caps every class at ceil(max_ratio * minority) and then oversamples all
// classes to the largest remaining count. Pass an infinite ratio for
// oversampling only.
SamplingPlan MakeSamplingPlan(const std::map<std::string, std::size_t>& counts,
                              double max_ratio, std::uint64_t seed);
// Identity plan for the given counts.
SamplingPlan MakeUnbalancedPlan(
    const std::map<std::string, std::size_t>& counts, std::uint64_t seed);
SamplingPlan MakePlanForMode(const std::map<std::string, std::size_t>& counts,
                             SamplingMode mode, double max_ratio,
                             std::uint64_t seed);

// Classes absent from the plan pass through untouched.
Dataset ApplySampling(const Dataset& data, const SamplingPlan& plan);
// The same selection expressed as indices into `labels`.
std::vector<std::size_t> SampleIndices(const std::vector<std::string>& labels,
                                       const SamplingPlan& plan);

// ---------------------------------------------------------------------------
// Splitting.

struct SplitFractions {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
  SplitFractions fractions;
};

DatasetSplit StratifiedSplit(const Dataset& data, const SplitFractions& fractions,
                             std::uint64_t seed);

}  // namespace offlang

#endif  // OFFLANG_CORPUS_HPP_
