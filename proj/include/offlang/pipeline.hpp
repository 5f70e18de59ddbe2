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

// End-to-end text classifier: normalization, feature assembly and a trained
// model, persisted together as one directory.

#ifndef OFFLANG_PIPELINE_HPP_
#define OFFLANG_PIPELINE_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offlang/charlm.hpp"
#include "offlang/classifier.hpp"
#include "offlang/corpus.hpp"
#include "offlang/embed.hpp"
#include "offlang/featurize.hpp"
#include "offlang/forest.hpp"
#include "offlang/lexicon.hpp"
#include "offlang/linear.hpp"
#include "offlang/normalize.hpp"

namespace offlang {

// Hyperparameters. Every field has a `key = value` name (see
// PipelineOptionKeys) so that config files and command-line flags share one
// vocabulary.
struct PipelineOptions {
  Task task = Task::k6A;
  ModelKind model = ModelKind::kForest;
  FeatureConfig features;
  SamplingMode sampling = SamplingMode::kBalanced;
  double max_ratio = 2.0;
  std::uint64_t seed = 42;
  ForestConfig forest;
  SvmConfig svm;
  LogisticConfig logistic;
  CharLmConfig lm;
  SkipgramConfig skipgram;
  CombineConfig combine;
};

const std::vector<std::string>& PipelineOptionKeys();
// Throws ValidationError on an unknown key or a bad value.
void ApplyPipelineOption(PipelineOptions& options, std::string_view key,
                         std::string_view value);
void WritePipelineOptions(std::ostream& out, const PipelineOptions& options);
PipelineOptions ReadPipelineOptions(std::istream& in);

// Word lists and tables the pipeline is built from.
struct PipelineResources {
  VariantDictionary variants;
  LeetMap leet = LeetMap::Default();
  std::vector<std::pair<std::string, Tier>> lexicon_phrases;  // raw phrases
  // Training words for the offensive LM; empty means the lexicon tokens.
  std::vector<std::string> offensive_words;
  // Training words for the clean LM; empty means training-corpus tokens that
  // are not lexicon tokens.
  std::vector<std::string> clean_words;
  // Second embedding space combined with the one trained on the corpus.
  std::optional<EmbeddingMatrix> external_embedding;
};

// Reads `TIER<TAB>phrase` lines without normalizing them.
std::vector<std::pair<std::string, Tier>> ReadLexiconPhrases(std::istream& in);
std::vector<std::string> ReadWordList(std::istream& in);

class TextPipeline {
 public:
  // Fits every component on `train`. `jobs` only affects speed.
  static TextPipeline Train(const Dataset& train, const PipelineOptions& options,
                            const PipelineResources& resources, int jobs = 1);

  NormalizedDocument Process(std::string_view raw) const;
  FeatureVector Featurize(std::string_view raw) const;
  Matrix FeatureMatrix(const std::vector<std::string>& raws, int jobs = 1) const;
  Matrix PredictProba(const std::vector<std::string>& raws, int jobs = 1) const;
  std::vector<std::string> Predict(const std::vector<std::string>& raws,
                                   int jobs = 1) const;

  const PipelineOptions& options() const { return state_->options; }
  const std::vector<std::string>& classes() const;
  const std::vector<std::string>& feature_names() const;
  const ProbabilisticClassifier& model() const { return *state_->model; }
  const Lexicon& lexicon() const { return state_->lexicon; }

  // Writes the directory (created if missing); existing files are replaced.
  void Save(const std::string& dir) const;
  static TextPipeline Load(const std::string& dir);

 private:
  struct State {
    PipelineOptions options;
    Normalizer normalizer;
    Lexicon lexicon;
    std::optional<CharGramLm> lm_off;
    std::optional<CharGramLm> lm_clean;
    std::optional<TfidfModel> tfidf;
    std::optional<EmbeddingMatrix> embedding;
    std::unique_ptr<FeatureAssembler> assembler;
    std::unique_ptr<ProbabilisticClassifier> model;
  };

  explicit TextPipeline(std::shared_ptr<const State> state)
      : state_(std::move(state)) {}

  static void BuildAssembler(State& state);
  static Vector BaseVector(const State& state, const NormalizedDocument& doc);

  std::shared_ptr<const State> state_;
};

}  // namespace offlang

#endif  // OFFLANG_PIPELINE_HPP_
