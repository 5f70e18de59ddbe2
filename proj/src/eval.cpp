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

#include "offlang/eval.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "offlang/common.hpp"

namespace offlang {
namespace {

double Ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

EvalReport MacroF1(const std::vector<std::string>& truth,
                   const std::vector<std::string>& pred,
                   const std::vector<std::string>& classes) {
  if (truth.size() != pred.size()) {
    throw ValidationError("truth and prediction lengths differ");
  }
  if (classes.empty()) throw ValidationError("no classes declared");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!index.emplace(classes[i], i).second) {
      throw ValidationError("duplicate class '" + classes[i] + "'");
    }
  }
  auto lookup = [&](const std::string& label) {
    const auto it = index.find(label);
    if (it == index.end()) {
      throw ValidationError("label '" + label + "' is not a declared class");
    }
    return it->second;
  };
  const std::size_t k = classes.size();
  EvalReport r;
  r.classes = classes;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[lookup(truth[i])][lookup(pred[i])];
  }
  r.per_class.resize(k);
  double correct = 0;
  double f1_sum = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double tp = static_cast<double>(r.confusion[c][c]);
    double predicted = 0, actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += static_cast<double>(r.confusion[o][c]);
      actual += static_cast<double>(r.confusion[c][o]);
    }
    ClassScores& s = r.per_class[c];
    s.precision = Ratio(tp, predicted);
    s.recall = Ratio(tp, actual);
    s.f1 = Ratio(2 * tp, predicted + actual);
    s.support = static_cast<std::size_t>(actual);
    correct += tp;
    f1_sum += s.f1;
  }
  r.macro_f1 = f1_sum / static_cast<double>(k);
  r.accuracy = Ratio(correct, static_cast<double>(truth.size()));
  return r;
}

void WriteEvalReport(std::ostream& out, const EvalReport& r) {
  out << "class\tprecision\trecall\tf1\tsupport\n";
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& s = r.per_class[c];
    out << r.classes[c] << '\t' << Fixed(s.precision) << '\t' << Fixed(s.recall)
        << '\t' << Fixed(s.f1) << '\t' << s.support << '\n';
  }
  out << "macro_f1\t" << Fixed(r.macro_f1) << '\n';
  out << "accuracy\t" << Fixed(r.accuracy) << '\n';
  out << "confusion";
  for (const auto& c : r.classes) out << '\t' << c;
  out << '\n';
  for (std::size_t t = 0; t < r.classes.size(); ++t) {
    out << r.classes[t];
    for (std::size_t p = 0; p < r.classes.size(); ++p) {
      out << '\t' << r.confusion[t][p];
    }
    out << '\n';
  }
}

AgreementReport FleissKappa(
    const std::vector<std::vector<std::size_t>>& ratings) {
  if (ratings.empty()) throw ValidationError("no items to rate");
  const std::size_t k = ratings.front().size();
  if (k == 0) throw ValidationError("no rating categories");
  std::size_t n = 0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i].size() != k) {
      throw ValidationError("item " + std::to_string(i + 1) +
                            " has a different category count");
    }
    std::size_t sum = 0;
    for (std::size_t v : ratings[i]) sum += v;
    if (i == 0) n = sum;
    if (sum != n) {
      throw ValidationError("item " + std::to_string(i + 1) + " has " +
                            std::to_string(sum) + " ratings, expected " +
                            std::to_string(n));
    }
  }
  if (n < 2) throw ValidationError("Fleiss' kappa needs at least 2 raters");
  const double items = static_cast<double>(ratings.size());
  const double dn = static_cast<double>(n);
  std::vector<double> p(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : ratings) {
    double agree = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = static_cast<double>(row[j]);
      p[j] += v;
      agree += v * (v - 1);
    }
    p_bar += agree / (dn * (dn - 1));
  }
  p_bar /= items;
  double p_e = 0.0;
  for (double& pj : p) {
    pj /= items * dn;
    p_e += pj * pj;
  }
  AgreementReport r;
  r.observed = p_bar;
  r.expected = p_e;
  r.raters = n;
  r.items = ratings.size();
  r.kappa = p_e == 1.0 ? 1.0 : (p_bar - p_e) / (1.0 - p_e);
  return r;
}

AgreementReport CohenKappa(const std::vector<std::string>& r1,
                           const std::vector<std::string>& r2) {
  if (r1.size() != r2.size()) throw ValidationError("rating lengths differ");
  if (r1.empty()) throw ValidationError("no items to rate");
  std::map<std::string, double> m1, m2;
  double agree = 0.0;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    m1[r1[i]] += 1;
    m2[r2[i]] += 1;
    agree += r1[i] == r2[i];
  }
  const double n = static_cast<double>(r1.size());
  double p_e = 0.0;
  for (const auto& [label, c] : m1) {
    const auto it = m2.find(label);
    if (it != m2.end()) p_e += (c / n) * (it->second / n);
  }
  AgreementReport r;
  r.observed = agree / n;
  r.expected = p_e;
  r.raters = 2;
  r.items = r1.size();
  r.kappa = p_e == 1.0 ? 1.0 : (r.observed - p_e) / (1.0 - p_e);
  return r;
}

}  // namespace offlang
