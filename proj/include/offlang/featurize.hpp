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

// Model input assembly. A feature vector is
//
//   [ base | graphemic (11) | tier counts (3) | perplexity gap (2) ]
//
// where the base block is a tf-idf vector, a pooled sentence embedding or
// empty, and every other block can be switched off.

#ifndef OFFLANG_FEATURIZE_HPP_
#define OFFLANG_FEATURIZE_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "offlang/charlm.hpp"
#include "offlang/common.hpp"
#include "offlang/embed.hpp"
#include "offlang/lexicon.hpp"
#include "offlang/normalize.hpp"

namespace offlang {

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

// ---------------------------------------------------------------------------
// Graphemic statistics.
//
// Character counts use the raw text with @mentions removed. Letters are
// general category L*, uppercase is Lu, digits are Nd, punctuation is P*,
// whitespace is the White_Space property; "special" is anything that is not
// a letter, digit or whitespace. Token count and mean token length (in code
// points) come from the normalized tokens; <USER> tokens add to the count
// only.

inline constexpr std::size_t kGraphemicSize = 11;
const std::vector<std::string>& GraphemicNames();

FeatureVector GraphemicFeatures(std::string_view raw,
                                const NormalizedDocument& doc);

// Raw code points minus @mentions ('@' followed by word characters, not
// preceded by a word character).
std::u32string StripMentions(std::u32string_view raw);

// ---------------------------------------------------------------------------
// tf-idf.

struct TfidfConfig {
  bool sublinear_tf = false;  // tf -> 1 + ln(tf)
  bool smooth_idf = true;     // ln((1+N)/(1+df)) + 1, else ln(N/df) + 1
  bool l2_normalize = true;
  std::size_t min_df = 1;
  std::size_t max_features = 0;  // 0: unlimited; otherwise keep highest df
};

// (column, value) pairs sorted by column.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

class TfidfModel {
 public:
  TfidfModel() = default;

  // Throws ValidationError on an empty corpus.
  static TfidfModel Fit(const std::vector<std::vector<std::string>>& corpus,
                        const TfidfConfig& config = {});

  SparseVector Transform(const std::vector<std::string>& tokens) const;
  Vector TransformDense(const std::vector<std::string>& tokens) const;

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  std::optional<std::size_t> Column(std::string_view term) const;
  const TfidfConfig& config() const { return config_; }

  void Save(std::ostream& out) const;
  static TfidfModel Load(std::istream& in);

 private:
  TfidfConfig config_;
  std::size_t num_docs_ = 0;
  std::vector<std::string> terms_;  // lexicographic
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

TfidfModel FitTfidf(const std::vector<std::vector<std::string>>& corpus,
                    const TfidfConfig& config = {});
SparseVector TransformTfidf(const TfidfModel& model,
                            const std::vector<std::string>& tokens);

// ---------------------------------------------------------------------------
// Sentence embedding: mean of token vectors. Tokens missing from the
// vocabulary are composed from subwords when possible and skipped otherwise.
Vector PoolEmbedding(const std::vector<std::string>& tokens,
                     const EmbeddingMatrix& embedding);

// ---------------------------------------------------------------------------
// Assembly.

enum class BaseVectorizer { kNone, kTfidf, kEmbedding };

BaseVectorizer ParseBaseVectorizer(std::string_view name);
std::string_view ToString(BaseVectorizer base);

struct FeatureBlocks {
  bool graphemic = true;
  bool lexicon = true;
  bool perplexity = true;
};

struct FeatureConfig {
  BaseVectorizer base = BaseVectorizer::kTfidf;
  FeatureBlocks blocks;
  TfidfConfig tfidf;
  bool normalize = true;

  friend bool operator==(const FeatureConfig& a, const FeatureConfig& b);
};

// `key = value` text: base, graphemic, blacklist, perplexity, normalize,
// sublinear_tf, smooth_idf, l2_normalize, min_df, max_terms.
void WriteFeatureConfig(std::ostream& out, const FeatureConfig& config);
FeatureConfig ReadFeatureConfig(std::istream& in);
// Applies one key; returns false if the key is not a feature key.
bool ApplyFeatureKey(FeatureConfig& config, std::string_view key,
                     std::string_view value);

// Binds the block layout and the resources the blocks need. Names are fixed
// at construction, so every document gets the same columns.
class FeatureAssembler {
 public:
  // `lexicon` must be non-null when the lexicon block is on; both models
  // when the perplexity block is on.
  FeatureAssembler(FeatureBlocks blocks, std::vector<std::string> base_names,
                   const Lexicon* lexicon, const CharGramLm* lm_off,
                   const CharGramLm* lm_clean);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  // Throws ValidationError if `base` does not have the bound base length or
  // any value is non-finite.
  FeatureVector Assemble(std::string_view raw, const NormalizedDocument& doc,
                         const Vector& base) const;

 private:
  FeatureBlocks blocks_;
  std::size_t base_size_;
  std::vector<std::string> names_;
  const Lexicon* lexicon_;
  const CharGramLm* lm_off_;
  const CharGramLm* lm_clean_;
};

// Tokens scored by the perplexity block: token cores, minus <USER> and
// tokens with nothing left after stripping punctuation.
std::vector<std::string> ScoredTokens(const std::vector<std::string>& tokens);

FeatureVector AssembleFeatures(std::string_view raw,
                               const NormalizedDocument& doc,
                               const Lexicon* lexicon, const CharGramLm* lm_off,
                               const CharGramLm* lm_clean, const Vector& base,
                               const FeatureBlocks& blocks);

// Writes a header of feature names, then one tab-separated row per vector.
void WriteFeatureMatrix(std::ostream& out,
                        const std::vector<FeatureVector>& rows);

}  // namespace offlang

#endif  // OFFLANG_FEATURIZE_HPP_
