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

// Generated corpora for tests.

#ifndef OFFLANG_TESTS_SUPPORT_SYNTHETIC_HPP_
#define OFFLANG_TESTS_SUPPORT_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "offlang/corpus.hpp"

namespace offlang::testing {

// OFF documents carry words from the bundled lexicon, NOT documents carry
// none; a 6-A classifier can separate them perfectly.
std::vector<LabeledDocument> SeparableCorpus(std::size_t n, std::uint64_t seed);

struct NoisyCorpus {
  std::vector<LabeledDocument> docs;
  // OFFENSIVE-tier pseudo-words; write with WriteLexicon.
  std::vector<std::string> offensive_words;
};

// Labels are a noisy function of lexicon hits. Most hits are obfuscated
// with leetspeak or diacritics so that matching them needs normalization.
// Clean documents carry digits and accented words at similar rates so that
// graphemic statistics alone do not reveal obfuscation.
NoisyCorpus NoisyLexiconCorpus(std::size_t n, std::uint64_t seed,
                               double label_noise = 0.08,
                               double obfuscation_rate = 0.7);

std::string LexiconText(const std::vector<std::string>& offensive_words);

// Obfuscates an ASCII lowercase word; the normalizer folds the result back.
std::string Obfuscate(const std::string& word, std::uint64_t seed);

void WriteTextFile(const std::string& path, const std::string& content);
std::string ReadTextFile(const std::string& path);
// Fresh empty directory under the system temp dir.
std::string MakeTempDir(const std::string& prefix);

}  // namespace offlang::testing

#endif  // OFFLANG_TESTS_SUPPORT_SYNTHETIC_HPP_
