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

// Classification metrics and inter-annotator agreement.

#ifndef OFFLANG_EVAL_HPP_
#define OFFLANG_EVAL_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace offlang {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<ClassScores> per_class;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  // confusion[t][p]: documents of true class t predicted as p.
  std::vector<std::vector<std::size_t>> confusion;
};

// Macro F1 over the declared classes; a class with no predictions and no
// support scores 0, as does any 0/0 ratio. Throws ValidationError on a length
// mismatch or a label outside `classes`.
EvalReport MacroF1(const std::vector<std::string>& truth,
                   const std::vector<std::string>& pred,
                   const std::vector<std::string>& classes);

void WriteEvalReport(std::ostream& out, const EvalReport& report);

struct AgreementReport {
  double kappa = 0.0;
  double observed = 0.0;  // P-bar (Fleiss) or p_o (Cohen)
  double expected = 0.0;  // P-bar_e or p_e
  std::size_t raters = 0;
  std::size_t items = 0;
};

// ratings[i][j]: raters who put item i in category j. Every row must sum to
// the same n >= 2. When all ratings fall in one category (P-bar_e = 1) the
// agreement is perfect and kappa is defined as 1.
AgreementReport FleissKappa(const std::vector<std::vector<std::size_t>>& ratings);

AgreementReport CohenKappa(const std::vector<std::string>& r1,
                           const std::vector<std::string>& r2);

}  // namespace offlang

#endif  // OFFLANG_EVAL_HPP_
