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

#include "offlang/embed.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/SVD>

namespace offlang {
namespace {

std::uint32_t Fnv1a(std::string_view bytes) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::string FormatComponent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double LogSigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool SubwordsEnabled(const SubwordSpec& spec) {
  return spec.max_n > 0 && spec.buckets > 0;
}

void ValidateSpec(const SubwordSpec& spec) {
  if (!SubwordsEnabled(spec)) return;
  if (spec.min_n < 1 || spec.min_n > spec.max_n) {
    throw ValidationError("subword n-gram range must satisfy 1 <= min <= max");
  }
}

}  // namespace

std::vector<std::size_t> SubwordBuckets(std::string_view word,
                                        const SubwordSpec& spec) {
  std::vector<std::size_t> out;
  if (!SubwordsEnabled(spec)) return out;
  std::u32string wrapped = U"<";
  wrapped += DecodeUtf8(word);
  wrapped += U">";
  const std::size_t len = wrapped.size();
  for (std::size_t n = static_cast<std::size_t>(spec.min_n);
       n <= static_cast<std::size_t>(spec.max_n) && n <= len; ++n) {
    for (std::size_t i = 0; i + n <= len; ++i) {
      const std::string gram = EncodeUtf8(std::u32string_view(wrapped).substr(i, n));
      out.push_back(Fnv1a(gram) % spec.buckets);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// EmbeddingMatrix

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
    throw ValidationError("embedding row count does not match vocabulary");
  }
  if (vectors_.cols() == 0) throw ValidationError("embedding dimension is 0");
  if (!vectors_.allFinite()) throw ValidationError("non-finite embedding value");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw ValidationError("duplicate embedding word '" + words_[i] + "'");
    }
  }
}

void EmbeddingMatrix::SetSubwords(SubwordSpec spec, Matrix bucket_vectors) {
  ValidateSpec(spec);
  if (!SubwordsEnabled(spec)) {
    subwords_.reset();
    return;
  }
  if (static_cast<std::size_t>(bucket_vectors.rows()) != spec.buckets ||
      bucket_vectors.cols() != vectors_.cols()) {
    throw ValidationError("subword table shape does not match the embedding");
  }
  if (!bucket_vectors.allFinite()) {
    throw ValidationError("non-finite subword vector");
  }
  subwords_ = Subwords{spec, std::move(bucket_vectors)};
}

std::optional<std::size_t> EmbeddingMatrix::Find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vector EmbeddingMatrix::ComposeOov(std::string_view word) const {
  if (word.empty()) throw ValidationError("cannot compose an empty word");
  if (auto i = Find(word)) return Row(*i);
  if (!subwords_) throw ValidationError("embedding has no subword table");
  Vector v = Vector::Zero(vectors_.cols());
  const auto buckets = SubwordBuckets(word, subwords_->spec);
  if (buckets.empty()) return v;
  for (std::size_t b : buckets) v += subwords_->vectors.row(b).transpose();
  return v / static_cast<double>(buckets.size());
}

void EmbeddingMatrix::SaveText(std::ostream& out) const {
  out << words_.size() << ' ' << dim() << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
      out << ' ' << FormatComponent(vectors_(i, j));
    }
    out << '\n';
  }
}

EmbeddingMatrix EmbeddingMatrix::LoadText(std::istream& in) {
  std::string line;
  if (!ReadLine(in, line)) throw ParseError("embedding file is empty", 1);
  std::size_t n = 0;
  std::size_t d = 0;
  {
    std::istringstream header(line);
    if (!(header >> n >> d) || d == 0) {
      throw ParseError("embedding header must be `|V| d`", 1);
    }
  }
  std::vector<std::string> words;
  words.reserve(n);
  Matrix vectors(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line_no = i + 2;
    if (!ReadLine(in, line)) throw ParseError("embedding file truncated", line_no);
    const auto cells = SplitString(line, ' ');
    if (cells.size() != d + 1) {
      throw ParseError("expected a word and " + std::to_string(d) + " values",
                       line_no);
    }
    words.push_back(cells[0]);
    for (std::size_t j = 0; j < d; ++j) {
      char* end = nullptr;
      vectors(i, j) = std::strtod(cells[j + 1].c_str(), &end);
      if (end == cells[j + 1].c_str() || *end != '\0') {
        throw ParseError("bad number '" + cells[j + 1] + "'", line_no);
      }
    }
  }
  return EmbeddingMatrix(std::move(words), std::move(vectors));
}

void EmbeddingMatrix::SaveSubwords(std::ostream& out) const {
  if (!subwords_) throw ValidationError("embedding has no subword table");
  const auto& s = *subwords_;
  out << s.spec.buckets << ' ' << dim() << ' ' << s.spec.min_n << ' '
      << s.spec.max_n << '\n';
  for (Eigen::Index i = 0; i < s.vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
      if (j > 0) out << ' ';
      out << FormatComponent(s.vectors(i, j));
    }
    out << '\n';
  }
}

void EmbeddingMatrix::LoadSubwords(std::istream& in) {
  std::string line;
  if (!ReadLine(in, line)) throw ParseError("subword file is empty", 1);
  SubwordSpec spec;
  std::size_t d = 0;
  {
    std::istringstream header(line);
    if (!(header >> spec.buckets >> d >> spec.min_n >> spec.max_n)) {
      throw ParseError("subword header must be `buckets d min_n max_n`", 1);
    }
  }
  if (d != dim()) throw ValidationError("subword dimension mismatch");
  Matrix vectors(spec.buckets, d);
  for (std::size_t i = 0; i < spec.buckets; ++i) {
    if (!ReadLine(in, line)) throw ParseError("subword file truncated", i + 2);
    const auto cells = SplitString(line, ' ');
    if (cells.size() != d) throw ParseError("wrong value count", i + 2);
    for (std::size_t j = 0; j < d; ++j) vectors(i, j) = std::strtod(cells[j].c_str(), nullptr);
  }
  SetSubwords(spec, std::move(vectors));
}

// ---------------------------------------------------------------------------
// Skip-gram

double NegativeSamplingLoss(const Vector& hidden, const Vector& positive,
                            const std::vector<Vector>& negatives,
                            Vector* grad_hidden, Vector* grad_positive,
                            std::vector<Vector>* grad_negatives) {
  const double s_pos = positive.dot(hidden);
  double loss = -LogSigmoid(s_pos);
  const double g_pos = Sigmoid(s_pos) - 1.0;
  if (grad_hidden) *grad_hidden = g_pos * positive;
  if (grad_positive) *grad_positive = g_pos * hidden;
  if (grad_negatives) grad_negatives->assign(negatives.size(), Vector());
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    const double s = negatives[j].dot(hidden);
    loss -= LogSigmoid(-s);
    const double g = Sigmoid(s);
    if (grad_hidden) *grad_hidden += g * negatives[j];
    if (grad_negatives) (*grad_negatives)[j] = g * hidden;
  }
  return loss;
}

SkipgramModel::SkipgramModel(std::vector<std::string> vocabulary,
                             const SkipgramConfig& config)
    : vocab_(std::move(vocabulary)), config_(config) {
  if (config_.dim <= 0) throw ValidationError("embedding dimension must be > 0");
  ValidateSpec(config_.subwords);
  const std::size_t v = vocab_.size();
  const std::size_t buckets =
      SubwordsEnabled(config_.subwords) ? config_.subwords.buckets : 0;
  const auto d = static_cast<Eigen::Index>(config_.dim);
  input_.resize(static_cast<Eigen::Index>(v + buckets), d);
  output_ = Matrix::Zero(static_cast<Eigen::Index>(v), d);
  Rng rng(DeriveSeed(config_.seed, 0x5e01));
  const double bound = 1.0 / config_.dim;
  for (Eigen::Index i = 0; i < input_.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) input_(i, j) = rng.Uniform(-bound, bound);
  }
  rows_.resize(v);
  for (std::size_t w = 0; w < v; ++w) {
    rows_[w].push_back(w);
    for (std::size_t b : SubwordBuckets(vocab_[w], config_.subwords)) {
      rows_[w].push_back(v + b);
    }
  }
}

Vector SkipgramModel::Hidden(std::size_t word) const {
  Vector h = Vector::Zero(input_.cols());
  for (std::size_t r : rows_[word]) h += input_.row(r).transpose();
  return h / static_cast<double>(rows_[word].size());
}

double SkipgramModel::ExampleLoss(std::size_t center, std::size_t context,
                                  const std::vector<std::size_t>& negatives,
                                  Matrix* grad_input,
                                  Matrix* grad_output) const {
  const Vector h = Hidden(center);
  std::vector<Vector> neg;
  neg.reserve(negatives.size());
  for (std::size_t n : negatives) neg.push_back(output_.row(n).transpose());
  Vector gh;
  Vector gpos;
  std::vector<Vector> gneg;
  const bool want = grad_input || grad_output;
  const double loss =
      NegativeSamplingLoss(h, output_.row(context).transpose(), neg,
                           want ? &gh : nullptr, want ? &gpos : nullptr,
                           want ? &gneg : nullptr);
  if (grad_input) {
    *grad_input = Matrix::Zero(input_.rows(), input_.cols());
    const double inv = 1.0 / static_cast<double>(rows_[center].size());
    for (std::size_t r : rows_[center]) grad_input->row(r) += inv * gh.transpose();
  }
  if (grad_output) {
    *grad_output = Matrix::Zero(output_.rows(), output_.cols());
    grad_output->row(context) += gpos.transpose();
    for (std::size_t j = 0; j < negatives.size(); ++j) {
      grad_output->row(negatives[j]) += gneg[j].transpose();
    }
  }
  return loss;
}

double SkipgramModel::Step(std::size_t center, std::size_t context,
                           const std::vector<std::size_t>& negatives,
                           double lr) {
  const Vector h = Hidden(center);
  std::vector<Vector> neg;
  neg.reserve(negatives.size());
  for (std::size_t n : negatives) neg.push_back(output_.row(n).transpose());
  Vector gh;
  Vector gpos;
  std::vector<Vector> gneg;
  const double loss = NegativeSamplingLoss(
      h, output_.row(context).transpose(), neg, &gh, &gpos, &gneg);
  output_.row(context) -= lr * gpos.transpose();
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    output_.row(negatives[j]) -= lr * gneg[j].transpose();
  }
  const double scale = lr / static_cast<double>(rows_[center].size());
  for (std::size_t r : rows_[center]) input_.row(r) -= scale * gh.transpose();
  return loss;
}

EmbeddingMatrix SkipgramModel::ToEmbedding() const {
  Matrix vectors(static_cast<Eigen::Index>(vocab_.size()), input_.cols());
  for (std::size_t w = 0; w < vocab_.size(); ++w) {
    vectors.row(w) = Hidden(w).transpose();
  }
  EmbeddingMatrix out(vocab_, std::move(vectors));
  if (SubwordsEnabled(config_.subwords)) {
    const auto v = static_cast<Eigen::Index>(vocab_.size());
    out.SetSubwords(config_.subwords, input_.bottomRows(input_.rows() - v));
  }
  return out;
}

SkipgramResult TrainSkipgram(const std::vector<std::vector<std::string>>& corpus,
                             const SkipgramConfig& config) {
  if (corpus.empty()) throw ValidationError("skip-gram corpus is empty");
  if (config.window < 1 || config.negatives < 1 || config.epochs < 1 ||
      !(config.learning_rate > 0)) {
    throw ValidationError("skip-gram needs window, negatives, epochs >= 1 and "
                          "a positive learning rate");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) ++counts[token];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [word, n] : counts) {
    if (!word.empty() && n >= static_cast<std::size_t>(std::max(config.min_count, 1))) {
      kept.emplace_back(word, n);
    }
  }
  if (kept.empty()) throw ValidationError("empty effective vocabulary");
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::string> vocab;
  std::map<std::string, std::size_t> index;
  std::vector<double> cumulative;
  double total_weight = 0.0;
  for (const auto& [word, n] : kept) {
    index.emplace(word, vocab.size());
    vocab.push_back(word);
    total_weight += std::pow(static_cast<double>(n), 0.75);
    cumulative.push_back(total_weight);
  }

  std::vector<std::vector<std::size_t>> ids;
  std::size_t total_tokens = 0;
  for (const auto& sentence : corpus) {
    auto& row = ids.emplace_back();
    for (const auto& token : sentence) {
      if (auto it = index.find(token); it != index.end()) row.push_back(it->second);
    }
    total_tokens += row.size();
  }

  SkipgramModel model(vocab, config);
  Rng rng(DeriveSeed(config.seed, 0x5e02));
  auto draw_negative = [&](std::size_t context) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double u = rng.Uniform() * total_weight;
      const auto pos = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      const std::size_t w = std::min(pos, vocab.size() - 1);
      if (w != context || vocab.size() == 1) return w;
    }
    return (context + 1) % vocab.size();
  };

  SkipgramResult result;
  const double steps = static_cast<double>(config.epochs) *
                       static_cast<double>(std::max<std::size_t>(total_tokens, 1));
  std::size_t processed = 0;
  std::vector<std::size_t> negatives(static_cast<std::size_t>(config.negatives));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t examples = 0;
    for (const auto& sentence : ids) {
      for (std::size_t i = 0; i < sentence.size(); ++i, ++processed) {
        const double progress = static_cast<double>(processed) / steps;
        const double lr =
            config.learning_rate * std::max(1.0 - progress, 1e-4);
        const std::size_t radius =
            rng.Index(static_cast<std::size_t>(config.window)) + 1;
        const std::size_t lo = i >= radius ? i - radius : 0;
        const std::size_t hi = std::min(sentence.size(), i + radius + 1);
        for (std::size_t j = lo; j < hi; ++j) {
          if (j == i) continue;
          for (auto& n : negatives) n = draw_negative(sentence[j]);
          loss_sum += model.Step(sentence[i], sentence[j], negatives, lr);
          ++examples;
        }
      }
    }
    result.epoch_loss.push_back(
        examples ? loss_sum / static_cast<double>(examples) : 0.0);
  }
  result.embedding = model.ToEmbedding();
  return result;
}

// ---------------------------------------------------------------------------
// Combination

TruncatedSvd ComputeTruncatedSvd(const Matrix& m, int k) {
  if (k <= 0) throw ValidationError("SVD rank must be positive");
  const Eigen::MatrixXd dense = m;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index avail = svd.singularValues().size();
  const Eigen::Index kk = k;
  TruncatedSvd out;
  out.u = Matrix::Zero(m.rows(), kk);
  out.s = Vector::Zero(kk);
  out.v = Matrix::Zero(m.cols(), kk);
  for (Eigen::Index c = 0; c < std::min(kk, avail); ++c) {
    Eigen::VectorXd u = svd.matrixU().col(c);
    Eigen::VectorXd v = svd.matrixV().col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) {
      u = -u;
      v = -v;
    }
    out.u.col(c) = u;
    out.v.col(c) = v;
    out.s(c) = svd.singularValues()(c);
  }
  return out;
}

namespace {

void PrepareBlock(Eigen::Ref<Matrix> block, const CombineConfig& config) {
  if (block.rows() == 0) return;
  if (config.center) {
    const Eigen::RowVectorXd mean = block.colwise().mean();
    block.rowwise() -= mean;
  }
  if (config.equalize) {
    const double rms =
        block.norm() / std::sqrt(static_cast<double>(block.cols()));
    if (rms > 0) block /= rms;
  }
}

}  // namespace

CombinedEmbedding CombineEmbeddings(const EmbeddingMatrix& a,
                                    const EmbeddingMatrix& b,
                                    const CombineConfig& config) {
  const auto da = static_cast<Eigen::Index>(a.dim());
  const auto db = static_cast<Eigen::Index>(b.dim());
  if (da == 0 || db == 0) throw ValidationError("embedding without columns");
  const int k = config.k == 0 ? static_cast<int>(std::max(da, db)) : config.k;
  if (k <= 0 || k > da + db) {
    throw ValidationError("combination rank must be in [1, dA + dB]");
  }
  std::vector<std::string> words = a.words();
  for (const auto& w : b.words()) {
    if (!a.Contains(w)) words.push_back(w);
  }
  if (words.empty()) throw ValidationError("empty vocabulary union");

  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(words.size()), da + db);
  auto fill = [&](const EmbeddingMatrix& e, Eigen::Index offset,
                  Eigen::Index d) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (auto r = e.Find(words[i])) {
        m.row(i).segment(offset, d) = e.vectors().row(*r);
      } else if (e.has_subwords()) {
        m.row(i).segment(offset, d) = e.ComposeOov(words[i]).transpose();
      }
    }
  };
  fill(a, 0, da);
  fill(b, da, db);
  PrepareBlock(m.leftCols(da), config);
  PrepareBlock(m.rightCols(db), config);

  CombinedEmbedding out;
  out.svd = ComputeTruncatedSvd(m, k);
  Matrix vectors = out.svd.u * out.svd.s.asDiagonal();
  out.embedding = EmbeddingMatrix(std::move(words), std::move(vectors));
  out.concatenated = std::move(m);
  return out;
}

double OovRate(const EmbeddingMatrix& embedding,
               const std::vector<std::vector<std::string>>& corpus) {
  std::set<std::string> types;
  for (const auto& sentence : corpus) types.insert(sentence.begin(), sentence.end());
  if (types.empty()) throw ValidationError("coverage needs a non-empty corpus");
  std::size_t missing = 0;
  for (const auto& t : types) missing += embedding.Contains(t) ? 0 : 1;
  return static_cast<double>(missing) / static_cast<double>(types.size());
}

}  // namespace offlang
