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

// Shared vocabulary: error types, the dense matrix alias, seeded RNG helpers
// and a few UTF-8 / text utilities used by every module.

#ifndef OFFLANG_COMMON_HPP_
#define OFFLANG_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace offlang {

// Input that cannot be read (bad syntax, bad encoding). Carries a 1-based
// line number when one is known, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input that parses but violates a contract (label hierarchy, preconditions,
// inconsistent dimensions).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Randomness. Every random stream in the library is derived from a user seed
// plus a stream/unit index, so parallel work units never share state.

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Unbiased integer in [0, n). n must be > 0.
  std::size_t Index(std::size_t n);
  // Double in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[Index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
// processed exactly once; callers write results into slot i so the outcome
// does not depend on scheduling.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Text helpers.

// Decodes UTF-8 into code points. Throws ParseError on malformed input.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);
std::string EncodeUtf8(char32_t cp);
bool IsValidUtf8(std::string_view text);

std::vector<std::string> SplitString(std::string_view s, char sep);
std::string_view TrimAscii(std::string_view s);
std::string JoinStrings(const std::vector<std::string>& parts,
                        std::string_view sep);

// Reads a line and strips a trailing '\r'. Returns false at EOF.
bool ReadLine(std::istream& in, std::string& line);

// Reads `key = value` lines; blank lines and lines starting with '#' are
// skipped. Keys and values are trimmed. Throws ParseError (with line number)
// on a line without '=' or with an empty key.
std::vector<std::pair<std::string, std::string>> ReadKeyValues(
    std::istream& in);

// Parses "true"/"false"/"1"/"0"/"yes"/"no"/"on"/"off". Throws ValidationError.
bool ParseBool(std::string_view value);

// Exact textual encoding of a double (hexadecimal float) for bit-exact
// round-trips, and its inverse.
std::string FormatExact(double v);
double ParseExact(const std::string& s);

}  // namespace offlang

#endif  // OFFLANG_COMMON_HPP_
