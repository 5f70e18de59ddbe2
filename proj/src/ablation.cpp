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

#include "offlang/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "offlang/eval.hpp"

namespace offlang {
namespace {

template <typename T, typename F>
std::vector<T> ParseList(std::string_view text, F parse) {
  std::vector<T> out;
  for (const auto& cell : SplitString(text, ',')) {
    const std::string_view item = TrimAscii(cell);
    if (!item.empty()) out.push_back(parse(item));
  }
  if (out.empty()) throw ValidationError("empty list '" + std::string(text) + "'");
  return out;
}

std::string ModelAbbrev(ModelKind kind) {
  switch (kind) {
    case ModelKind::kForest: return "RF";
    case ModelKind::kSvm: return "SVM";
    case ModelKind::kLogistic: return "LR";
  }
  return "?";
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<ModelKind> ParseModelList(std::string_view text) {
  return ParseList<ModelKind>(text, ParseModelKind);
}

std::vector<BaseVectorizer> ParseBaseList(std::string_view text) {
  return ParseList<BaseVectorizer>(text, ParseBaseVectorizer);
}

std::vector<SamplingMode> ParseSamplingList(std::string_view text) {
  return ParseList<SamplingMode>(text, ParseSamplingMode);
}

std::vector<bool> ParseFeatureList(std::string_view text) {
  return ParseList<bool>(text, ParseBool);
}

bool AblationCell::features() const {
  const FeatureBlocks& b = options.features.blocks;
  return b.graphemic || b.lexicon || b.perplexity;
}

std::string AblationCell::Label() const {
  std::string label = ModelAbbrev(options.model);
  switch (options.features.base) {
    case BaseVectorizer::kNone: label += "-T"; break;
    case BaseVectorizer::kTfidf: break;
    case BaseVectorizer::kEmbedding: label += "+U"; break;
  }
  if (features()) label += "+F";
  return label;
}

PipelineOptions CellOptions(const PipelineOptions& base, ModelKind model,
                            BaseVectorizer vectorizer, bool features,
                            SamplingMode sampling) {
  PipelineOptions o = base;
  o.model = model;
  o.features.base = vectorizer;
  o.features.blocks = FeatureBlocks{features, features, features};
  o.sampling = sampling;
  return o;
}

AblationCell RunCell(const PipelineOptions& options, const DatasetSplit& split,
                     const PipelineResources& resources, int jobs) {
  AblationCell cell;
  cell.options = options;
  try {
    if (split.test.empty()) throw ValidationError("empty test split");
    const TextPipeline pipeline =
        TextPipeline::Train(split.train, options, resources, jobs);
    std::vector<std::string> raws, truth;
    for (const auto& ex : split.test) {
      raws.push_back(ex.doc.raw_text);
      truth.push_back(ex.label);
    }
    const auto pred = pipeline.Predict(raws, jobs);
    cell.macro_f1 = MacroF1(truth, pred, pipeline.classes()).macro_f1;
  } catch (const std::exception& e) {
    cell.error = e.what();
    if (cell.error.empty()) cell.error = "unknown failure";
  }
  return cell;
}

AblationReport RunAblation(const AblationGrid& grid, const DatasetSplit& split,
                           const PipelineOptions& base,
                           const PipelineResources& resources, int jobs) {
  AblationReport report;
  for (ModelKind model : grid.models) {
    for (BaseVectorizer vectorizer : grid.bases) {
      for (bool features : grid.features) {
        for (SamplingMode sampling : grid.samplings) {
          report.cells.push_back(RunCell(
              CellOptions(base, model, vectorizer, features, sampling), split,
              resources, jobs));
        }
      }
    }
  }
  const AblationCell* best = nullptr;
  for (const auto& cell : report.cells) {
    if (!cell.ok()) {
      report.partial = true;
    } else if (best == nullptr || cell.macro_f1 > best->macro_f1) {
      best = &cell;
    }
  }
  if (grid.normalization_comparison && best != nullptr) {
    PipelineOptions off = best->options;
    off.features.normalize = false;
    report.normalization.push_back(*best);
    report.normalization.push_back(RunCell(off, split, resources, jobs));
    if (!report.normalization.back().ok()) report.partial = true;
  }
  return report;
}

void WriteAblationMatrix(std::ostream& out, const AblationReport& report) {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::map<std::pair<std::string, std::string>, std::string> values;
  auto add = [&](const AblationCell& cell, const std::string& suffix) {
    const std::string row = cell.Label() + suffix;
    const std::string col(ToString(cell.options.sampling));
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
    values[{row, col}] = cell.ok() ? Fixed(cell.macro_f1) : "error";
  };
  for (const auto& cell : report.cells) add(cell, "");
  if (report.normalization.size() == 2) {
    add(report.normalization[1], " (unnormalized)");
  }
  out << "model";
  for (const auto& c : cols) out << '\t' << c;
  out << '\n';
  for (const auto& r : rows) {
    out << r;
    for (const auto& c : cols) {
      const auto it = values.find({r, c});
      out << '\t' << (it == values.end() ? "-" : it->second);
    }
    out << '\n';
  }
  if (report.partial) out << "# partial: some cells failed\n";
}

void WriteAblationDetail(std::ostream& out, const AblationReport& report) {
  auto write = [&](const AblationCell& cell, const std::string& group) {
    out << "[cell]\n";
    out << "group = " << group << '\n';
    out << "label = " << cell.Label() << '\n';
    out << "macro_f1 = " << (cell.ok() ? FormatExact(cell.macro_f1) : "nan") << '\n';
    out << "status = " << (cell.ok() ? "ok" : "error") << '\n';
    if (!cell.ok()) {
      std::string msg = cell.error;
      for (char& c : msg) {
        if (c == '\n' || c == '\r') c = ' ';
      }
      out << "error = " << msg << '\n';
    }
    WritePipelineOptions(out, cell.options);
    out << '\n';
  };
  out << "partial = " << (report.partial ? "true" : "false") << "\n\n";
  for (const auto& cell : report.cells) write(cell, "grid");
  for (const auto& cell : report.normalization) write(cell, "normalization");
}

}  // namespace offlang
