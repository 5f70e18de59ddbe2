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

// Character n-gram language model with additive smoothing.
//
// A word w of m code points is scored as m + 1 transitions: each character
// and a final end-of-word sentinel, each conditioned on the previous n - 1
// symbols (start sentinels pad the left edge). With counts c(h, x) and
// alphabet size V,
//
//   P(x | h) = (c(h, x) + alpha) / (c(h) + alpha * V)
//
// Training counts each distinct word once. The alphabet holds every training
// character plus the end sentinel, and by default a reserved UNK symbol that
// absorbs characters never seen in training so that any word has finite
// perplexity.

#ifndef OFFLANG_CHARLM_HPP_
#define OFFLANG_CHARLM_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace offlang {

// Private-use code points reserved as sentinels; training words may not
// contain them.
inline constexpr char32_t kLmStart = 0xE000;
inline constexpr char32_t kLmEnd = 0xE001;
inline constexpr char32_t kLmUnk = 0xE002;

struct CharLmConfig {
  int order = 3;
  double alpha = 0.1;
  bool reserve_unk = true;
};

class CharGramLm {
 public:
  // Trains on `words`. Throws ValidationError on an empty list, order < 2,
  // alpha <= 0 or a word containing a sentinel.
  static CharGramLm Train(const std::vector<std::string>& words,
                          const CharLmConfig& config);

  // P(next | context); context holds the last order-1 symbols.
  double Probability(std::u32string_view context, char32_t next) const;
  double LogProbability(std::u32string_view context, char32_t next) const;

  double Perplexity(std::string_view word) const;

  int order() const { return config_.order; }
  double alpha() const { return config_.alpha; }
  const CharLmConfig& config() const { return config_; }
  // Predictable symbols (training characters, end sentinel, UNK if reserved).
  const std::set<char32_t>& alphabet() const { return alphabet_; }
  // Contexts observed in training.
  std::vector<std::u32string> Contexts() const;

  void Save(std::ostream& out) const;
  static CharGramLm Load(std::istream& in);
  void SaveFile(const std::string& path) const;
  static CharGramLm LoadFile(const std::string& path);

  friend bool operator==(const CharGramLm& a, const CharGramLm& b) {
    return a.config_.order == b.config_.order &&
           a.config_.alpha == b.config_.alpha &&
           a.config_.reserve_unk == b.config_.reserve_unk &&
           a.alphabet_ == b.alphabet_ && a.counts_ == b.counts_;
  }

 private:
  struct ContextCounts {
    std::map<char32_t, std::uint64_t> next;
    std::uint64_t total = 0;

    friend bool operator==(const ContextCounts&,
                           const ContextCounts&) = default;
  };

  // Maps characters outside the alphabet to UNK.
  char32_t MapSymbol(char32_t c) const;

  CharLmConfig config_;
  std::set<char32_t> alphabet_;
  std::map<std::u32string, ContextCounts> counts_;
};

struct PerplexityGap {
  std::vector<double> per_token;
  double mean = 0.0;
  double max = 0.0;
};

CharGramLm TrainCharLm(const std::vector<std::string>& words, int order,
                       double alpha);
double Perplexity(const CharGramLm& lm, std::string_view word);

// gap(token) = PPL_clean(token) - PPL_off(token); positive values mean the
// token looks more like the offensive vocabulary.
PerplexityGap ComputePerplexityGap(const CharGramLm& lm_off,
                                   const CharGramLm& lm_clean,
                                   const std::vector<std::string>& tokens);

}  // namespace offlang

#endif  // OFFLANG_CHARLM_HPP_
