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

#include "offlang/charlm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "offlang/common.hpp"

namespace offlang {
namespace {

constexpr std::string_view kMagic = "offlang-charlm";
constexpr int kVersion = 1;

bool IsSentinel(char32_t c) {
  return c == kLmStart || c == kLmEnd || c == kLmUnk;
}

std::string HexSymbols(std::u32string_view s) {
  std::ostringstream out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out << ',';
    out << std::hex << static_cast<std::uint32_t>(s[i]);
  }
  return s.empty() ? "-" : out.str();
}

std::u32string ParseHexSymbols(const std::string& s) {
  std::u32string out;
  if (s == "-") return out;
  for (const auto& part : SplitString(s, ',')) {
    out.push_back(static_cast<char32_t>(std::stoul(part, nullptr, 16)));
  }
  return out;
}

}  // namespace

CharGramLm CharGramLm::Train(const std::vector<std::string>& words,
                             const CharLmConfig& config) {
  if (words.empty()) throw ValidationError("char LM needs training words");
  if (config.order < 2) throw ValidationError("char LM order must be >= 2");
  if (!(config.alpha > 0) || !std::isfinite(config.alpha)) {
    throw ValidationError("char LM alpha must be positive");
  }
  CharGramLm lm;
  lm.config_ = config;
  const std::size_t history = static_cast<std::size_t>(config.order - 1);
  // The model is trained on word types: a word list is a dictionary, and
  // repeating an entry must not change the model.
  const std::set<std::string> types(words.begin(), words.end());
  for (const auto& word : types) {
    const std::u32string cps = DecodeUtf8(word);
    if (std::any_of(cps.begin(), cps.end(), IsSentinel)) {
      throw ValidationError("training word contains a reserved sentinel");
    }
    std::u32string padded(history, kLmStart);
    padded += cps;
    padded.push_back(kLmEnd);
    for (std::size_t i = history; i < padded.size(); ++i) {
      const std::u32string context = padded.substr(i - history, history);
      auto& cc = lm.counts_[context];
      ++cc.next[padded[i]];
      ++cc.total;
      lm.alphabet_.insert(padded[i]);
    }
  }
  if (config.reserve_unk) lm.alphabet_.insert(kLmUnk);
  return lm;
}

char32_t CharGramLm::MapSymbol(char32_t c) const {
  return alphabet_.count(c) ? c : kLmUnk;
}

double CharGramLm::Probability(std::u32string_view context,
                               char32_t next) const {
  return std::exp(LogProbability(context, next));
}

double CharGramLm::LogProbability(std::u32string_view context,
                                  char32_t next) const {
  const double v = static_cast<double>(alphabet_.size());
  const char32_t symbol = MapSymbol(next);
  if (!alphabet_.count(symbol)) return -INFINITY;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  if (auto it = counts_.find(std::u32string(context)); it != counts_.end()) {
    total = it->second.total;
    if (auto jt = it->second.next.find(symbol); jt != it->second.next.end()) {
      count = jt->second;
    }
  }
  return std::log(static_cast<double>(count) + config_.alpha) -
         std::log(static_cast<double>(total) + config_.alpha * v);
}

double CharGramLm::Perplexity(std::string_view word) const {
  const std::size_t history = static_cast<std::size_t>(config_.order - 1);
  std::u32string padded(history, kLmStart);
  for (char32_t c : DecodeUtf8(word)) padded.push_back(MapSymbol(c));
  padded.push_back(kLmEnd);
  double log_sum = 0.0;
  const std::size_t transitions = padded.size() - history;
  for (std::size_t i = history; i < padded.size(); ++i) {
    log_sum += LogProbability(
        std::u32string_view(padded).substr(i - history, history), padded[i]);
  }
  return std::exp(-log_sum / static_cast<double>(transitions));
}

std::vector<std::u32string> CharGramLm::Contexts() const {
  std::vector<std::u32string> out;
  out.reserve(counts_.size());
  for (const auto& [context, cc] : counts_) out.push_back(context);
  return out;
}

void CharGramLm::Save(std::ostream& out) const {
  out << kMagic << ' ' << kVersion << '\n';
  out << "order " << config_.order << '\n';
  out << "alpha " << FormatExact(config_.alpha) << '\n';
  out << "unk " << (config_.reserve_unk ? 1 : 0) << '\n';
  out << "alphabet " << HexSymbols(std::u32string(alphabet_.begin(),
                                                  alphabet_.end()))
      << '\n';
  out << "contexts " << counts_.size() << '\n';
  for (const auto& [context, cc] : counts_) {
    out << HexSymbols(context);
    for (const auto& [symbol, n] : cc.next) {
      out << '\t' << std::hex << static_cast<std::uint32_t>(symbol) << std::dec
          << ':' << n;
    }
    out << '\n';
  }
}

CharGramLm CharGramLm::Load(std::istream& in) {
  CharGramLm lm;
  std::string line;
  auto expect = [&](std::string_view key) {
    if (!ReadLine(in, line) || line.rfind(key, 0) != 0) {
      throw ParseError("char LM file: expected '" + std::string(key) + "'");
    }
    return line.substr(key.size() + 1);
  };
  const std::string version = expect(kMagic);
  if (std::stoi(version) != kVersion) {
    throw ParseError("char LM file: unsupported version " + version);
  }
  lm.config_.order = std::stoi(expect("order"));
  lm.config_.alpha = ParseExact(expect("alpha"));
  lm.config_.reserve_unk = expect("unk") == "1";
  const std::u32string alphabet = ParseHexSymbols(expect("alphabet"));
  lm.alphabet_ = std::set<char32_t>(alphabet.begin(), alphabet.end());
  const std::size_t n = std::stoul(expect("contexts"));
  for (std::size_t i = 0; i < n; ++i) {
    if (!ReadLine(in, line)) throw ParseError("char LM file: truncated");
    const auto cells = SplitString(line, '\t');
    auto& cc = lm.counts_[ParseHexSymbols(cells[0])];
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const auto colon = cells[k].find(':');
      if (colon == std::string::npos) {
        throw ParseError("char LM file: malformed count '" + cells[k] + "'");
      }
      const auto symbol =
          static_cast<char32_t>(std::stoul(cells[k].substr(0, colon), nullptr, 16));
      const std::uint64_t count = std::stoull(cells[k].substr(colon + 1));
      cc.next[symbol] = count;
      cc.total += count;
    }
  }
  return lm;
}

void CharGramLm::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  Save(out);
}

CharGramLm CharGramLm::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open char LM '" + path + "'");
  return Load(in);
}

CharGramLm TrainCharLm(const std::vector<std::string>& words, int order,
                       double alpha) {
  CharLmConfig config;
  config.order = order;
  config.alpha = alpha;
  return CharGramLm::Train(words, config);
}

double Perplexity(const CharGramLm& lm, std::string_view word) {
  return lm.Perplexity(word);
}

PerplexityGap ComputePerplexityGap(const CharGramLm& lm_off,
                                   const CharGramLm& lm_clean,
                                   const std::vector<std::string>& tokens) {
  if (lm_off.order() != lm_clean.order() ||
      lm_off.config().reserve_unk != lm_clean.config().reserve_unk) {
    throw ValidationError("perplexity gap needs models with one order and "
                          "alphabet policy");
  }
  PerplexityGap gap;
  gap.per_token.reserve(tokens.size());
  for (const auto& token : tokens) {
    gap.per_token.push_back(lm_clean.Perplexity(token) -
                            lm_off.Perplexity(token));
  }
  if (!gap.per_token.empty()) {
    double sum = 0.0;
    gap.max = gap.per_token.front();
    for (double g : gap.per_token) {
      sum += g;
      gap.max = std::max(gap.max, g);
    }
    gap.mean = sum / static_cast<double>(gap.per_token.size());
  }
  return gap;
}

}  // namespace offlang
