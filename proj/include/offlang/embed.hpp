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

// Word embeddings: subword skip-gram training with negative sampling,
// combination of two spaces by column concatenation and truncated SVD, and
// vocabulary coverage.

#ifndef OFFLANG_EMBED_HPP_
#define OFFLANG_EMBED_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "offlang/common.hpp"

namespace offlang {

// Hashed character n-grams of "<word>" for n in [min_n, max_n].
struct SubwordSpec {
  int min_n = 3;
  int max_n = 6;
  std::size_t buckets = 20000;
};

std::vector<std::size_t> SubwordBuckets(std::string_view word,
                                        const SubwordSpec& spec);

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws ValidationError on duplicate words, a row count mismatch, d == 0
  // or non-finite values.
  EmbeddingMatrix(std::vector<std::string> words, Matrix vectors);

  // Attaches subword bucket vectors (buckets x dim) used for OOV words.
  void SetSubwords(SubwordSpec spec, Matrix bucket_vectors);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }
  bool has_subwords() const { return subwords_.has_value(); }
  const SubwordSpec& subword_spec() const { return subwords_->spec; }
  const Matrix& bucket_vectors() const { return subwords_->vectors; }

  std::optional<std::size_t> Find(std::string_view word) const;
  bool Contains(std::string_view word) const { return Find(word).has_value(); }
  Vector Row(std::size_t i) const { return vectors_.row(i).transpose(); }

  // The matrix row for an in-vocabulary word, otherwise the mean of the
  // word's subword bucket vectors. Throws ValidationError on an empty word or
  // when the matrix has no subword table.
  Vector ComposeOov(std::string_view word) const;

  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }

  // Text interchange: first line `|V| d`, then `word v1 ... vd`.
  void SaveText(std::ostream& out) const;
  static EmbeddingMatrix LoadText(std::istream& in);
  // Subword table: `buckets d min_n max_n`, then one row per bucket.
  void SaveSubwords(std::ostream& out) const;
  void LoadSubwords(std::istream& in);

 private:
  struct Subwords {
    SubwordSpec spec;
    Matrix vectors;
  };

  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  Matrix vectors_;
  std::optional<Subwords> subwords_;
};

// ---------------------------------------------------------------------------
// Skip-gram with negative sampling.

struct SkipgramConfig {
  int dim = 50;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.05;
  int min_count = 1;
  SubwordSpec subwords;  // max_n = 0 disables subwords
  std::uint64_t seed = 1;
};

// Loss of one (hidden, positive output, negative outputs) example:
//   -log s(u+ . h) - sum_j log s(-u_j . h)
// with s the logistic function. Fills gradients w.r.t. h and every output
// vector when `grad_*` are non-null.
double NegativeSamplingLoss(const Vector& hidden, const Vector& positive,
                            const std::vector<Vector>& negatives,
                            Vector* grad_hidden, Vector* grad_positive,
                            std::vector<Vector>* grad_negatives);

// Trainable parameters: one input row per word and per subword bucket, one
// output row per word. A word's hidden vector is the mean of its input row
// and its bucket rows.
class SkipgramModel {
 public:
  SkipgramModel(std::vector<std::string> vocabulary, const SkipgramConfig& config);

  std::size_t vocab_size() const { return vocab_.size(); }
  Matrix& input() { return input_; }
  Matrix& output() { return output_; }
  const Matrix& input() const { return input_; }
  const Matrix& output() const { return output_; }

  // Input rows composing word i.
  const std::vector<std::size_t>& InputRows(std::size_t word) const {
    return rows_[word];
  }
  Vector Hidden(std::size_t word) const;

  // Loss of predicting `context` (and rejecting `negatives`) from `center`.
  // When gradients are requested they are dense, shaped like input()/output().
  double ExampleLoss(std::size_t center, std::size_t context,
                     const std::vector<std::size_t>& negatives,
                     Matrix* grad_input, Matrix* grad_output) const;

  // One SGD step on the example; returns its loss before the update.
  double Step(std::size_t center, std::size_t context,
              const std::vector<std::size_t>& negatives, double lr);

  EmbeddingMatrix ToEmbedding() const;

 private:
  std::vector<std::string> vocab_;
  SkipgramConfig config_;
  Matrix input_;
  Matrix output_;
  std::vector<std::vector<std::size_t>> rows_;
};

struct SkipgramResult {
  EmbeddingMatrix embedding;
  std::vector<double> epoch_loss;  // mean example loss per epoch
};

// Deterministic for a fixed seed (training is single-threaded).
SkipgramResult TrainSkipgram(const std::vector<std::vector<std::string>>& corpus,
                             const SkipgramConfig& config);

// ---------------------------------------------------------------------------
// Combination.

struct TruncatedSvd {
  Matrix u;   // rows x k
  Vector s;   // k
  Matrix v;   // cols x k
};

// Rank-k SVD of `m` (dense, deterministic). Each right singular vector is
// signed so that its largest-magnitude component is positive. If k exceeds
// min(rows, cols) the extra components are zero.
TruncatedSvd ComputeTruncatedSvd(const Matrix& m, int k);

struct CombineConfig {
  int k = 0;            // 0: max(dA, dB)
  bool center = true;   // subtract column means per block
  bool equalize = true; // scale each block to unit RMS column norm
};

struct CombinedEmbedding {
  EmbeddingMatrix embedding;  // rows U_k * S_k
  Matrix concatenated;        // the preprocessed [A' | B']
  TruncatedSvd svd;
};

// Rows are the union vocabulary: A's words in order, then B's new words in
// order. A word missing from one space takes that space's subword composition
// when available, otherwise a zero block.
CombinedEmbedding CombineEmbeddings(const EmbeddingMatrix& a,
                                    const EmbeddingMatrix& b,
                                    const CombineConfig& config = {});

// Fraction of corpus word types missing from the vocabulary.
double OovRate(const EmbeddingMatrix& embedding,
               const std::vector<std::vector<std::string>>& corpus);

}  // namespace offlang

#endif  // OFFLANG_EMBED_HPP_
