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

#include "offlang/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "offlang/common.hpp"

namespace offlang {
namespace {

constexpr std::string_view kOlidHeader =
    "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c";
constexpr std::string_view kNull = "NULL";

std::optional<OffenseLabel> ParseOffense(std::string_view s) {
  if (s == "OFF") return OffenseLabel::kOff;
  if (s == "NOT") return OffenseLabel::kNot;
  return std::nullopt;
}

std::optional<TargetingLabel> ParseTargeting(std::string_view s) {
  if (s == "TIN") return TargetingLabel::kTin;
  if (s == "UNT") return TargetingLabel::kUnt;
  return std::nullopt;
}

std::optional<TargetLabel> ParseTarget(std::string_view s) {
  if (s == "IND") return TargetLabel::kInd;
  if (s == "GRP") return TargetLabel::kGrp;
  if (s == "OTH") return TargetLabel::kOth;
  return std::nullopt;
}

std::optional<HateLabel> ParseHate(std::string_view s) {
  if (s == "HATE") return HateLabel::kHate;
  if (s == "NOHATE") return HateLabel::kNoHate;
  return std::nullopt;
}

template <typename T, typename F>
std::optional<T> ParseOlidCell(std::string_view cell, F parse,
                               std::size_t line) {
  if (cell == kNull) return std::nullopt;
  auto v = parse(cell);
  if (!v) throw ParseError("unknown label '" + std::string(cell) + "'", line);
  return v;
}

// Fills the label fields of `doc` from a slash path like "OFF/TIN/IND".
// Ancestors implied by a deeper label are filled in.
void ApplyLabelPath(std::string_view path, LabeledDocument& doc,
                    std::size_t line) {
  if (path == "-") return;
  for (const std::string& part : SplitString(path, '/')) {
    if (auto a = ParseOffense(part)) {
      doc.label_a = a;
    } else if (auto b = ParseTargeting(part)) {
      doc.label_b = b;
      doc.label_a = OffenseLabel::kOff;
    } else if (auto c = ParseTarget(part)) {
      doc.label_c = c;
      doc.label_b = TargetingLabel::kTin;
      doc.label_a = OffenseLabel::kOff;
    } else if (auto h = ParseHate(part)) {
      doc.label_hate = h;
    } else {
      throw ParseError("unknown label '" + part + "'", line);
    }
  }
}

std::string LabelPath(const LabeledDocument& doc) {
  std::vector<std::string> parts;
  if (doc.label_a) parts.emplace_back(ToString(*doc.label_a));
  if (doc.label_b) parts.emplace_back(ToString(*doc.label_b));
  if (doc.label_c) parts.emplace_back(ToString(*doc.label_c));
  if (doc.label_hate) parts.emplace_back(ToString(*doc.label_hate));
  return parts.empty() ? "-" : JoinStrings(parts, "/");
}

}  // namespace

std::string_view ToString(OffenseLabel l) {
  return l == OffenseLabel::kOff ? "OFF" : "NOT";
}
std::string_view ToString(TargetingLabel l) {
  return l == TargetingLabel::kTin ? "TIN" : "UNT";
}
std::string_view ToString(TargetLabel l) {
  switch (l) {
    case TargetLabel::kInd:
      return "IND";
    case TargetLabel::kGrp:
      return "GRP";
    case TargetLabel::kOth:
      return "OTH";
  }
  return "";
}
std::string_view ToString(HateLabel l) {
  return l == HateLabel::kHate ? "HATE" : "NOHATE";
}

void ValidateDocument(const LabeledDocument& doc) {
  if (TrimAscii(doc.raw_text).empty()) {
    throw ValidationError("document '" + doc.id + "' has empty text");
  }
  if (doc.label_b && doc.label_a != OffenseLabel::kOff) {
    throw ValidationError("document '" + doc.id +
                          "': subtask_b label requires subtask_a = OFF");
  }
  if (doc.label_c && doc.label_b != TargetingLabel::kTin) {
    throw ValidationError("document '" + doc.id +
                          "': subtask_c label requires subtask_b = TIN");
  }
}

std::vector<LabeledDocument> ParseOlid(std::istream& in) {
  std::string line;
  if (!ReadLine(in, line) || line != kOlidHeader) {
    throw ParseError("expected OLID header '" + std::string(kOlidHeader) + "'",
                     1);
  }
  std::vector<LabeledDocument> docs;
  std::size_t line_no = 1;
  while (ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!IsValidUtf8(line)) throw ParseError("invalid UTF-8", line_no);
    const auto cells = SplitString(line, '\t');
    if (cells.size() != 5) {
      throw ParseError("expected 5 tab-separated columns, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    LabeledDocument doc;
    doc.id = cells[0];
    doc.raw_text = cells[1];
    doc.label_a = ParseOlidCell<OffenseLabel>(cells[2], ParseOffense, line_no);
    doc.label_b =
        ParseOlidCell<TargetingLabel>(cells[3], ParseTargeting, line_no);
    doc.label_c = ParseOlidCell<TargetLabel>(cells[4], ParseTarget, line_no);
    doc.source = "olid";
    ValidateDocument(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

void WriteOlid(std::ostream& out, const std::vector<LabeledDocument>& docs) {
  out << kOlidHeader << '\n';
  for (const auto& doc : docs) {
    ValidateDocument(doc);
    if (doc.raw_text.find_first_of("\t\n\r") != std::string::npos ||
        doc.id.find_first_of("\t\n\r") != std::string::npos) {
      throw ValidationError("document '" + doc.id +
                            "' contains a tab or newline; not OLID-safe");
    }
    out << doc.id << '\t' << doc.raw_text << '\t'
        << (doc.label_a ? ToString(*doc.label_a) : kNull) << '\t'
        << (doc.label_b ? ToString(*doc.label_b) : kNull) << '\t'
        << (doc.label_c ? ToString(*doc.label_c) : kNull) << '\n';
  }
}

std::string EscapeField(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string UnescapeField(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      const char next = text[i + 1];
      if (next == 't' || next == 'n' || next == '\\') {
        out.push_back(next == 't' ? '\t' : next == 'n' ? '\n' : '\\');
        ++i;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

std::vector<LabeledDocument> ParseInternalTsv(std::istream& in,
                                              std::string_view source) {
  std::vector<LabeledDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!IsValidUtf8(line)) throw ParseError("invalid UTF-8", line_no);
    const auto cells = SplitString(line, '\t');
    LabeledDocument doc;
    doc.source = std::string(source);
    if (cells.size() == 3) {
      doc.id = cells[0];
      ApplyLabelPath(cells[1], doc, line_no);
      doc.raw_text = UnescapeField(cells[2]);
    } else if (cells.size() == 2) {
      // Unlabeled `id<TAB>text`, as accepted by prediction.
      doc.id = cells[0];
      doc.raw_text = UnescapeField(cells[1]);
    } else {
      throw ParseError("expected 3 tab-separated columns, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    ValidateDocument(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

void WriteInternalTsv(std::ostream& out,
                      const std::vector<LabeledDocument>& docs) {
  for (const auto& doc : docs) {
    ValidateDocument(doc);
    out << EscapeField(doc.id) << '\t' << LabelPath(doc) << '\t'
        << EscapeField(doc.raw_text) << '\n';
  }
}

std::vector<LabeledDocument> ReadCorpusFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus file '" + path + "'");
  std::string first;
  std::getline(in, first);
  if (!first.empty() && first.back() == '\r') first.pop_back();
  in.clear();
  in.seekg(0);
  if (first.rfind("id\ttweet", 0) == 0) return ParseOlid(in);
  return ParseInternalTsv(in, "tsv");
}

// ---------------------------------------------------------------------------

Task ParseTask(std::string_view name) {
  if (name == "5-A" || name == "5A") return Task::k5A;
  if (name == "6-A" || name == "6A") return Task::k6A;
  if (name == "6-B" || name == "6B") return Task::k6B;
  if (name == "6-C" || name == "6C") return Task::k6C;
  throw ValidationError("unknown task '" + std::string(name) +
                        "' (expected 5-A, 6-A, 6-B or 6-C)");
}

std::string_view ToString(Task task) {
  switch (task) {
    case Task::k5A:
      return "5-A";
    case Task::k6A:
      return "6-A";
    case Task::k6B:
      return "6-B";
    case Task::k6C:
      return "6-C";
  }
  return "";
}

const std::vector<std::string>& TaskClasses(Task task) {
  static const std::vector<std::string> k5A = {"HATE", "NOHATE"};
  static const std::vector<std::string> k6A = {"OFF", "NOT"};
  static const std::vector<std::string> k6B = {"TIN", "UNT"};
  static const std::vector<std::string> k6C = {"IND", "GRP", "OTH"};
  switch (task) {
    case Task::k5A:
      return k5A;
    case Task::k6A:
      return k6A;
    case Task::k6B:
      return k6B;
    case Task::k6C:
      return k6C;
  }
  return k6A;
}

std::optional<std::string> TargetLabelOf(const LabeledDocument& doc,
                                         Task task) {
  switch (task) {
    case Task::k5A:
      if (doc.label_hate) return std::string(ToString(*doc.label_hate));
      break;
    case Task::k6A:
      if (doc.label_a) return std::string(ToString(*doc.label_a));
      break;
    case Task::k6B:
      if (doc.label_b) return std::string(ToString(*doc.label_b));
      break;
    case Task::k6C:
      if (doc.label_c) return std::string(ToString(*doc.label_c));
      break;
  }
  return std::nullopt;
}

Dataset MakeTaskDataset(const std::vector<LabeledDocument>& docs, Task task) {
  Dataset out;
  for (const auto& doc : docs) {
    if (auto label = TargetLabelOf(doc, task)) {
      out.push_back({doc, *label});
    }
  }
  return out;
}

std::map<std::string, std::size_t> ClassCounts(const Dataset& data) {
  std::map<std::string, std::size_t> counts;
  for (const auto& ex : data) ++counts[ex.label];
  return counts;
}

// ---------------------------------------------------------------------------

SamplingMode ParseSamplingMode(std::string_view name) {
  if (name == "balanced") return SamplingMode::kBalanced;
  if (name == "full" || name == "FULL") return SamplingMode::kFull;
  if (name == "unb" || name == "UNB" || name == "unbalanced") {
    return SamplingMode::kUnbalanced;
  }
  throw ValidationError("unknown sampling mode '" + std::string(name) +
                        "' (expected balanced, full or unb)");
}

std::string_view ToString(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::kBalanced:
      return "balanced";
    case SamplingMode::kFull:
      return "full";
    case SamplingMode::kUnbalanced:
      return "unb";
  }
  return "";
}

SamplingPlan MakeSamplingPlan(const std::map<std::string, std::size_t>& counts,
                              double max_ratio, std::uint64_t seed) {
  if (counts.size() < 2) {
    throw ValidationError("sampling plan needs at least two classes");
  }
  if (!(max_ratio > 0)) {
    throw ValidationError("sampling max_ratio must be positive");
  }
  std::size_t minority = std::numeric_limits<std::size_t>::max();
  for (const auto& [label, n] : counts) {
    if (n == 0) {
      throw ValidationError("class '" + label + "' has no documents");
    }
    minority = std::min(minority, n);
  }
  std::size_t cap = std::numeric_limits<std::size_t>::max();
  if (std::isfinite(max_ratio)) {
    cap = static_cast<std::size_t>(
        std::ceil(max_ratio * static_cast<double>(minority)));
  }
  std::size_t level = 0;
  for (const auto& [label, n] : counts) level = std::max(level, std::min(n, cap));

  SamplingPlan plan;
  plan.max_ratio = max_ratio;
  plan.seed = seed;
  for (const auto& [label, n] : counts) plan.targets[label] = level;
  return plan;
}

SamplingPlan MakeUnbalancedPlan(
    const std::map<std::string, std::size_t>& counts, std::uint64_t seed) {
  SamplingPlan plan;
  plan.targets = counts;
  plan.seed = seed;
  plan.unbalanced = true;
  plan.max_ratio = std::numeric_limits<double>::infinity();
  return plan;
}

SamplingPlan MakePlanForMode(const std::map<std::string, std::size_t>& counts,
                             SamplingMode mode, double max_ratio,
                             std::uint64_t seed) {
  switch (mode) {
    case SamplingMode::kBalanced:
      return MakeSamplingPlan(counts, max_ratio, seed);
    case SamplingMode::kFull:
      return MakeSamplingPlan(counts, std::numeric_limits<double>::infinity(),
                              seed);
    case SamplingMode::kUnbalanced:
      return MakeUnbalancedPlan(counts, seed);
  }
  return MakeUnbalancedPlan(counts, seed);
}

std::vector<std::size_t> SampleIndices(const std::vector<std::string>& labels,
                                       const SamplingPlan& plan) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
  }
  for (const auto& [label, target] : plan.targets) {
    if (by_class.find(label) == by_class.end()) {
      throw ValidationError("sampling plan references class '" + label +
                            "' absent from the dataset");
    }
  }

  std::vector<std::size_t> chosen;
  std::uint64_t class_index = 0;
  for (auto& [label, indices] : by_class) {
    const auto it = plan.targets.find(label);
    if (it == plan.targets.end()) {
      chosen.insert(chosen.end(), indices.begin(), indices.end());
      ++class_index;
      continue;
    }
    const std::size_t target = it->second;
    Rng rng(DeriveSeed(plan.seed, 0x5a3d, class_index++));
    if (target <= indices.size()) {
      rng.Shuffle(indices);
      indices.resize(target);
      std::sort(indices.begin(), indices.end());
      chosen.insert(chosen.end(), indices.begin(), indices.end());
    } else {
      chosen.insert(chosen.end(), indices.begin(), indices.end());
      const std::size_t n = indices.size();
      for (std::size_t k = n; k < target; ++k) {
        chosen.push_back(indices[rng.Index(n)]);
      }
    }
  }

  Rng order(DeriveSeed(plan.seed, 0x5a3e));
  order.Shuffle(chosen);
  return chosen;
}

Dataset ApplySampling(const Dataset& data, const SamplingPlan& plan) {
  std::vector<std::string> labels;
  labels.reserve(data.size());
  for (const auto& ex : data) labels.push_back(ex.label);
  Dataset out;
  for (std::size_t i : SampleIndices(labels, plan)) out.push_back(data[i]);
  return out;
}

// ---------------------------------------------------------------------------

DatasetSplit StratifiedSplit(const Dataset& data, const SplitFractions& f,
                             std::uint64_t seed) {
  if (!(f.train > 0) || !(f.dev > 0) || !(f.test > 0)) {
    throw ValidationError("split fractions must all be positive");
  }
  if (std::abs(f.train + f.dev + f.test - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  std::set<std::string> ids;
  for (const auto& ex : data) {
    if (!ids.insert(ex.doc.id).second) {
      throw ValidationError("duplicate document id '" + ex.doc.id +
                            "' cannot be split disjointly");
    }
  }

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[data[i].label].push_back(i);
  }

  std::vector<std::size_t> train_idx, dev_idx, test_idx;
  std::uint64_t class_index = 0;
  for (auto& [label, indices] : by_class) {
    const double n = static_cast<double>(indices.size());
    const auto n_dev = static_cast<std::size_t>(std::llround(f.dev * n));
    const auto n_test = static_cast<std::size_t>(std::llround(f.test * n));
    if (n_dev < 1 || n_test < 1 || n_dev + n_test >= indices.size()) {
      throw ValidationError("class '" + label + "' has " +
                            std::to_string(indices.size()) +
                            " documents; too few for one per split");
    }
    Rng rng(DeriveSeed(seed, 0x5b11, class_index++));
    rng.Shuffle(indices);
    dev_idx.insert(dev_idx.end(), indices.begin(), indices.begin() + n_dev);
    test_idx.insert(test_idx.end(), indices.begin() + n_dev,
                    indices.begin() + n_dev + n_test);
    train_idx.insert(train_idx.end(), indices.begin() + n_dev + n_test,
                     indices.end());
  }

  auto gather = [&](std::vector<std::size_t>& idx) {
    std::sort(idx.begin(), idx.end());
    Dataset out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(data[i]);
    return out;
  };
  DatasetSplit split;
  split.train = gather(train_idx);
  split.dev = gather(dev_idx);
  split.test = gather(test_idx);
  split.fractions = f;
  return split;
}

}  // namespace offlang
