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

#include "offlang/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <unicode/uchar.h>

#include "offlang/corpus.hpp"

namespace offlang {
namespace {

bool IsLetter(char32_t c) {
  switch (u_charType(static_cast<UChar32>(c))) {
    case U_UPPERCASE_LETTER:
    case U_LOWERCASE_LETTER:
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
      return true;
    default:
      return false;
  }
}

bool IsUpper(char32_t c) {
  return u_charType(static_cast<UChar32>(c)) == U_UPPERCASE_LETTER;
}

bool IsDigit(char32_t c) {
  return u_charType(static_cast<UChar32>(c)) == U_DECIMAL_DIGIT_NUMBER;
}

bool IsPunct(char32_t c) {
  switch (u_charType(static_cast<UChar32>(c))) {
    case U_CONNECTOR_PUNCTUATION:
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
      return true;
    default:
      return false;
  }
}

bool IsSpace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool IsWordChar(char32_t c) {
  return c == U'_' || IsLetter(c) || u_isdigit(static_cast<UChar32>(c));
}

constexpr std::string_view kTfidfMagic = "offlang-tfidf 1";

}  // namespace

const std::vector<std::string>& GraphemicNames() {
  static const std::vector<std::string> names = {
      "g_chars",   "g_tokens", "g_upper",          "g_upper_ratio",
      "g_special", "g_punct",  "g_exclaim",        "g_question",
      "g_digits",  "g_mean_token_len", "g_elongated"};
  return names;
}

std::u32string StripMentions(std::u32string_view raw) {
  std::u32string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const bool boundary = i == 0 || !IsWordChar(raw[i - 1]);
    if (raw[i] == U'@' && boundary && i + 1 < raw.size() &&
        IsWordChar(raw[i + 1])) {
      ++i;
      while (i < raw.size() && IsWordChar(raw[i])) ++i;
      continue;
    }
    out.push_back(raw[i++]);
  }
  return out;
}

FeatureVector GraphemicFeatures(std::string_view raw,
                                const NormalizedDocument& doc) {
  const std::u32string text = StripMentions(DecodeUtf8(raw));
  double letters = 0, upper = 0, special = 0, punct = 0, exclaim = 0,
         question = 0, digits = 0;
  bool elongated = false;
  std::size_t run = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    run = (i > 0 && text[i - 1] == c) ? run + 1 : 1;
    if (run > 2) elongated = true;
    const bool letter = IsLetter(c);
    const bool digit = IsDigit(c);
    letters += letter;
    upper += IsUpper(c);
    digits += digit;
    punct += IsPunct(c);
    special += !letter && !digit && !IsSpace(c);
    exclaim += c == U'!';
    question += c == U'?';
  }
  double token_chars = 0;
  double word_tokens = 0;
  for (const auto& t : doc.tokens) {
    if (t == kUserToken) continue;
    token_chars += static_cast<double>(DecodeUtf8(t).size());
    ++word_tokens;
  }
  FeatureVector fv;
  fv.names = GraphemicNames();
  fv.values = {static_cast<double>(text.size()),
               static_cast<double>(doc.tokens.size()),
               upper,
               letters > 0 ? upper / letters : 0.0,
               special,
               punct,
               exclaim,
               question,
               digits,
               word_tokens > 0 ? token_chars / word_tokens : 0.0,
               elongated ? 1.0 : 0.0};
  return fv;
}

// ---------------------------------------------------------------------------
// tf-idf

TfidfModel TfidfModel::Fit(const std::vector<std::vector<std::string>>& corpus,
                           const TfidfConfig& config) {
  if (corpus.empty()) throw ValidationError("tf-idf needs a non-empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    for (const auto& term : std::set<std::string>(doc.begin(), doc.end())) {
      ++df[term];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [term, n] : df) {
    if (n >= std::max<std::size_t>(config.min_df, 1)) kept.emplace_back(term, n);
  }
  if (config.max_features > 0 && kept.size() > config.max_features) {
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    kept.resize(config.max_features);
    std::sort(kept.begin(), kept.end());
  }
  TfidfModel model;
  model.config_ = config;
  model.num_docs_ = corpus.size();
  const double n = static_cast<double>(corpus.size());
  for (const auto& [term, d] : kept) {
    model.index_.emplace(term, model.terms_.size());
    model.terms_.push_back(term);
    model.df_.push_back(d);
    const double dd = static_cast<double>(d);
    model.idf_.push_back(config.smooth_idf
                             ? std::log((1.0 + n) / (1.0 + dd)) + 1.0
                             : std::log(n / dd) + 1.0);
  }
  return model;
}

std::optional<std::size_t> TfidfModel::Column(std::string_view term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfModel::Transform(
    const std::vector<std::string>& tokens) const {
  std::map<std::size_t, double> tf;
  for (const auto& t : tokens) {
    if (auto c = Column(t)) tf[*c] += 1.0;
  }
  SparseVector out;
  out.reserve(tf.size());
  double norm2 = 0.0;
  for (const auto& [col, count] : tf) {
    const double w = config_.sublinear_tf ? 1.0 + std::log(count) : count;
    const double v = w * idf_[col];
    out.emplace_back(col, v);
    norm2 += v * v;
  }
  if (config_.l2_normalize && norm2 > 0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& [col, v] : out) v *= inv;
  }
  return out;
}

Vector TfidfModel::TransformDense(const std::vector<std::string>& tokens) const {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(terms_.size()));
  for (const auto& [col, value] : Transform(tokens)) v(col) = value;
  return v;
}

void TfidfModel::Save(std::ostream& out) const {
  out << kTfidfMagic << '\n';
  out << "sublinear_tf " << config_.sublinear_tf << '\n'
      << "smooth_idf " << config_.smooth_idf << '\n'
      << "l2_normalize " << config_.l2_normalize << '\n'
      << "min_df " << config_.min_df << '\n'
      << "max_features " << config_.max_features << '\n'
      << "docs " << num_docs_ << '\n'
      << "terms " << terms_.size() << '\n';
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out << EscapeField(terms_[i]) << '\t' << df_[i] << '\t'
        << FormatExact(idf_[i]) << '\n';
  }
}

TfidfModel TfidfModel::Load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::string& {
    ++line_no;
    if (!ReadLine(in, line)) throw ParseError("tf-idf file truncated", line_no);
    return line;
  };
  if (next() != kTfidfMagic) throw ParseError("not a tf-idf model", 1);
  auto field = [&](std::string_view key) {
    const std::string& l = next();
    if (l.rfind(key, 0) != 0 || l.size() <= key.size() + 1) {
      throw ParseError("expected '" + std::string(key) + "'", line_no);
    }
    return std::stoull(l.substr(key.size() + 1));
  };
  TfidfModel m;
  m.config_.sublinear_tf = field("sublinear_tf") != 0;
  m.config_.smooth_idf = field("smooth_idf") != 0;
  m.config_.l2_normalize = field("l2_normalize") != 0;
  m.config_.min_df = field("min_df");
  m.config_.max_features = field("max_features");
  m.num_docs_ = field("docs");
  const std::size_t n = field("terms");
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = SplitString(next(), '\t');
    if (cells.size() != 3) throw ParseError("malformed tf-idf term", line_no);
    m.index_.emplace(UnescapeField(cells[0]), m.terms_.size());
    m.terms_.push_back(UnescapeField(cells[0]));
    m.df_.push_back(std::stoull(cells[1]));
    m.idf_.push_back(ParseExact(cells[2]));
  }
  return m;
}

TfidfModel FitTfidf(const std::vector<std::vector<std::string>>& corpus,
                    const TfidfConfig& config) {
  return TfidfModel::Fit(corpus, config);
}

SparseVector TransformTfidf(const TfidfModel& model,
                            const std::vector<std::string>& tokens) {
  return model.Transform(tokens);
}

// ---------------------------------------------------------------------------
// Pooling

Vector PoolEmbedding(const std::vector<std::string>& tokens,
                     const EmbeddingMatrix& embedding) {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(embedding.dim()));
  std::size_t used = 0;
  for (const auto& t : tokens) {
    if (auto r = embedding.Find(t)) {
      sum += embedding.vectors().row(*r).transpose();
    } else if (embedding.has_subwords() && !t.empty()) {
      sum += embedding.ComposeOov(t);
    } else {
      continue;
    }
    ++used;
  }
  if (used > 0) sum /= static_cast<double>(used);
  return sum;
}

// ---------------------------------------------------------------------------
// Configuration

BaseVectorizer ParseBaseVectorizer(std::string_view name) {
  if (name == "none") return BaseVectorizer::kNone;
  if (name == "tfidf") return BaseVectorizer::kTfidf;
  if (name == "embedding") return BaseVectorizer::kEmbedding;
  throw ValidationError("unknown base vectorizer '" + std::string(name) +
                        "' (expected none, tfidf or embedding)");
}

std::string_view ToString(BaseVectorizer base) {
  switch (base) {
    case BaseVectorizer::kNone:
      return "none";
    case BaseVectorizer::kTfidf:
      return "tfidf";
    case BaseVectorizer::kEmbedding:
      return "embedding";
  }
  return "none";
}

bool operator==(const FeatureConfig& a, const FeatureConfig& b) {
  return a.base == b.base && a.blocks.graphemic == b.blocks.graphemic &&
         a.blocks.lexicon == b.blocks.lexicon &&
         a.blocks.perplexity == b.blocks.perplexity &&
         a.tfidf.sublinear_tf == b.tfidf.sublinear_tf &&
         a.tfidf.smooth_idf == b.tfidf.smooth_idf &&
         a.tfidf.l2_normalize == b.tfidf.l2_normalize &&
         a.tfidf.min_df == b.tfidf.min_df &&
         a.tfidf.max_features == b.tfidf.max_features &&
         a.normalize == b.normalize;
}

void WriteFeatureConfig(std::ostream& out, const FeatureConfig& c) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "base = " << ToString(c.base) << '\n'
      << "graphemic = " << b(c.blocks.graphemic) << '\n'
      << "blacklist = " << b(c.blocks.lexicon) << '\n'
      << "perplexity = " << b(c.blocks.perplexity) << '\n'
      << "normalize = " << b(c.normalize) << '\n'
      << "sublinear_tf = " << b(c.tfidf.sublinear_tf) << '\n'
      << "smooth_idf = " << b(c.tfidf.smooth_idf) << '\n'
      << "l2_normalize = " << b(c.tfidf.l2_normalize) << '\n'
      << "min_df = " << c.tfidf.min_df << '\n'
      << "max_terms = " << c.tfidf.max_features << '\n';
}

bool ApplyFeatureKey(FeatureConfig& c, std::string_view key,
                     std::string_view value) {
  auto count = [&]() {
    std::size_t pos = 0;
    const std::string s(value);
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || s[0] == '-') {
      throw ValidationError("'" + std::string(key) +
                            "' needs a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  };
  if (key == "base") {
    c.base = ParseBaseVectorizer(value);
  } else if (key == "graphemic") {
    c.blocks.graphemic = ParseBool(value);
  } else if (key == "blacklist") {
    c.blocks.lexicon = ParseBool(value);
  } else if (key == "perplexity") {
    c.blocks.perplexity = ParseBool(value);
  } else if (key == "normalize") {
    c.normalize = ParseBool(value);
  } else if (key == "sublinear_tf") {
    c.tfidf.sublinear_tf = ParseBool(value);
  } else if (key == "smooth_idf") {
    c.tfidf.smooth_idf = ParseBool(value);
  } else if (key == "l2_normalize") {
    c.tfidf.l2_normalize = ParseBool(value);
  } else if (key == "min_df") {
    c.tfidf.min_df = count();
  } else if (key == "max_terms") {
    c.tfidf.max_features = count();
  } else {
    return false;
  }
  return true;
}

FeatureConfig ReadFeatureConfig(std::istream& in) {
  FeatureConfig c;
  for (const auto& [key, value] : ReadKeyValues(in)) {
    if (!ApplyFeatureKey(c, key, value)) {
      throw ValidationError("unknown feature config key '" + key + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Assembly

std::vector<std::string> ScoredTokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (t == kUserToken) continue;
    std::string core = TokenCore(t);
    if (!core.empty()) out.push_back(std::move(core));
  }
  return out;
}

FeatureAssembler::FeatureAssembler(FeatureBlocks blocks,
                                   std::vector<std::string> base_names,
                                   const Lexicon* lexicon,
                                   const CharGramLm* lm_off,
                                   const CharGramLm* lm_clean)
    : blocks_(blocks),
      base_size_(base_names.size()),
      names_(std::move(base_names)),
      lexicon_(lexicon),
      lm_off_(lm_off),
      lm_clean_(lm_clean) {
  if (blocks_.lexicon && !lexicon_) {
    throw ValidationError("lexicon block enabled without a lexicon");
  }
  if (blocks_.perplexity && (!lm_off_ || !lm_clean_)) {
    throw ValidationError("perplexity block enabled without both models");
  }
  if (blocks_.graphemic) {
    names_.insert(names_.end(), GraphemicNames().begin(),
                  GraphemicNames().end());
  }
  if (blocks_.lexicon) {
    names_.insert(names_.end(), {"lex_offensive", "lex_contextual", "lex_total"});
  }
  if (blocks_.perplexity) {
    names_.insert(names_.end(), {"lm_gap_mean", "lm_gap_max"});
  }
  if (std::set<std::string>(names_.begin(), names_.end()).size() !=
      names_.size()) {
    throw ValidationError("duplicate feature names");
  }
}

FeatureVector FeatureAssembler::Assemble(std::string_view raw,
                                         const NormalizedDocument& doc,
                                         const Vector& base) const {
  if (static_cast<std::size_t>(base.size()) != base_size_) {
    throw ValidationError("base vector has length " +
                          std::to_string(base.size()) + ", expected " +
                          std::to_string(base_size_));
  }
  FeatureVector fv;
  fv.names = names_;
  fv.values.reserve(names_.size());
  fv.values.assign(base.data(), base.data() + base.size());
  if (blocks_.graphemic) {
    const FeatureVector g = GraphemicFeatures(raw, doc);
    fv.values.insert(fv.values.end(), g.values.begin(), g.values.end());
  }
  if (blocks_.lexicon) {
    const TierCounts counts = lexicon_->Match(doc.tokens);
    fv.values.push_back(static_cast<double>(counts.offensive));
    fv.values.push_back(static_cast<double>(counts.contextual));
    fv.values.push_back(static_cast<double>(counts.total()));
  }
  if (blocks_.perplexity) {
    const PerplexityGap gap =
        ComputePerplexityGap(*lm_off_, *lm_clean_, ScoredTokens(doc.tokens));
    fv.values.push_back(gap.mean);
    fv.values.push_back(gap.max);
  }
  for (double v : fv.values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  return fv;
}

FeatureVector AssembleFeatures(std::string_view raw,
                               const NormalizedDocument& doc,
                               const Lexicon* lexicon, const CharGramLm* lm_off,
                               const CharGramLm* lm_clean, const Vector& base,
                               const FeatureBlocks& blocks) {
  std::vector<std::string> base_names;
  base_names.reserve(static_cast<std::size_t>(base.size()));
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    base_names.push_back("base_" + std::to_string(i));
  }
  return FeatureAssembler(blocks, std::move(base_names), lexicon, lm_off,
                          lm_clean)
      .Assemble(raw, doc, base);
}

void WriteFeatureMatrix(std::ostream& out,
                        const std::vector<FeatureVector>& rows) {
  if (rows.empty()) return;
  out << JoinStrings(rows.front().names, "\t") << '\n';
  for (const auto& r : rows) {
    if (r.names != rows.front().names) {
      throw ValidationError("feature matrix rows have different columns");
    }
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (i > 0) out << '\t';
      out << FormatExact(r.values[i]);
    }
    out << '\n';
  }
}

}  // namespace offlang
