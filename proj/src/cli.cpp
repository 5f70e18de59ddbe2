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

#include "offlang/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "offlang/ablation.hpp"
#include "offlang/corpus.hpp"
#include "offlang/ensemble.hpp"
#include "offlang/eval.hpp"
#include "offlang/pipeline.hpp"

#ifndef OFFLANG_DATA_DIR
#define OFFLANG_DATA_DIR "data"
#endif

namespace offlang {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string>& ResourceKeys() {
  static const std::vector<std::string> keys = {
      "data",  "lexicon", "variants", "leet", "clean_words", "offensive_words",
      "embedding"};
  return keys;
}

bool IsResourceKey(const std::string& key) {
  const auto& k = ResourceKeys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

std::string Format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Format6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void WriteTextFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Values given on the command line for config keys. A key counts as given
// only when its option appeared, so config-file values are not clobbered by
// defaults.
class SettingStore {
 public:
  void AddOptions(CLI::App* app, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
      std::string names = "--" + key;
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != key) names += ",--" + dashed;
      options_[key] = app->add_option(names, values_[key],
                                      "override config key '" + key + "'");
    }
  }

  std::vector<std::pair<std::string, std::string>> Given() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) out.emplace_back(key, values_.at(key));
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

struct GlobalFlags {
  std::uint64_t seed = 42;
  int jobs = 1;
  bool no_normalize = false;
  std::string config;
  CLI::Option* seed_option = nullptr;
};

struct RunSettings {
  PipelineOptions options;
  std::map<std::string, std::string> paths;  // resource keys
};

std::string DataPath(const std::string& name) {
  return (fs::path(DefaultDataDir()) / name).string();
}

// Defaults, then the config file, then explicit flags.
RunSettings ResolveSettings(const GlobalFlags& flags, const SettingStore& store) {
  RunSettings s;
  s.paths["lexicon"] = DataPath("lexicon.tsv");
  s.paths["variants"] = DataPath("variants.tsv");
  s.paths["leet"] = DataPath("leet.tsv");
  auto apply = [&](const std::string& key, const std::string& value) {
    if (IsResourceKey(key)) {
      s.paths[key] = value;
    } else if (key == "jobs" || key == "out" || key == "config") {
      throw ValidationError("key '" + key + "' is not allowed in a config file");
    } else {
      ApplyPipelineOption(s.options, key, value);
    }
  };
  if (!flags.config.empty()) {
    std::ifstream in(flags.config, std::ios::binary);
    if (!in) throw ValidationError("cannot open config '" + flags.config + "'");
    for (const auto& [key, value] : ReadKeyValues(in)) apply(key, value);
  }
  for (const auto& [key, value] : store.Given()) apply(key, value);
  if (flags.seed_option != nullptr && flags.seed_option->count() > 0) {
    s.options.seed = flags.seed;
  }
  if (flags.no_normalize) s.options.features.normalize = false;
  return s;
}

std::string RequirePath(const RunSettings& s, const std::string& key) {
  const auto it = s.paths.find(key);
  if (it == s.paths.end() || it->second.empty()) {
    throw ValidationError("missing --" + key);
  }
  return it->second;
}

std::ifstream OpenInput(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + what + " '" + path + "'");
  return in;
}

PipelineResources LoadResources(const RunSettings& s) {
  PipelineResources r;
  auto path = [&](const std::string& key) {
    const auto it = s.paths.find(key);
    return it == s.paths.end() ? std::string() : it->second;
  };
  if (const auto p = path("variants"); !p.empty()) {
    if (!fs::exists(p)) throw ValidationError("missing variant dictionary '" + p + "'");
    r.variants = VariantDictionary::LoadFile(p);
  }
  if (const auto p = path("leet"); !p.empty()) {
    auto in = OpenInput(p, "leet table");
    r.leet = LoadLeetMap(in);
  }
  if (const auto p = path("lexicon"); !p.empty()) {
    auto in = OpenInput(p, "lexicon");
    r.lexicon_phrases = ReadLexiconPhrases(in);
  }
  if (const auto p = path("offensive_words"); !p.empty()) {
    auto in = OpenInput(p, "offensive word list");
    r.offensive_words = ReadWordList(in);
  }
  if (const auto p = path("clean_words"); !p.empty()) {
    auto in = OpenInput(p, "clean word list");
    r.clean_words = ReadWordList(in);
  }
  if (const auto p = path("embedding"); !p.empty()) {
    auto in = OpenInput(p, "embedding");
    r.external_embedding = EmbeddingMatrix::LoadText(in);
  }
  return r;
}

std::string EffectiveConfig(const RunSettings& s) {
  std::ostringstream out;
  WritePipelineOptions(out, s.options);
  for (const auto& key : ResourceKeys()) {
    const auto it = s.paths.find(key);
    if (it != s.paths.end() && !it->second.empty()) {
      out << key << " = " << it->second << '\n';
    }
  }
  return out.str();
}

// Marks an output directory as in use for the lifetime of the object.
class OutputLock {
 public:
  explicit OutputLock(const std::string& dir) {
    if (dir.empty()) throw ValidationError("missing --out");
    fs::create_directories(dir);
    path_ = (fs::path(dir) / ".offlang.lock").string();
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw ValidationError("output directory '" + dir +
                            "' is locked by another run (remove " + path_ +
                            " if stale)");
    }
    ::close(fd);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::string path_;
};

Dataset LoadTaskData(const RunSettings& s) {
  const auto docs = ReadCorpusFile(RequirePath(s, "data"));
  Dataset data = MakeTaskDataset(docs, s.options.task);
  if (data.empty()) {
    throw ValidationError("no documents carry a label for task " +
                          std::string(ToString(s.options.task)));
  }
  return data;
}

void SplitExamples(const Dataset& data, std::vector<std::string>& raws,
                   std::vector<std::string>& labels) {
  for (const auto& ex : data) {
    raws.push_back(ex.doc.raw_text);
    labels.push_back(ex.label);
  }
}

std::string PredictionTable(const std::vector<LabeledDocument>& docs,
                            const std::vector<std::string>& classes,
                            const Matrix& proba) {
  std::ostringstream out;
  out << "id\tlabel";
  for (const auto& c : classes) out << '\t' << c;
  out << '\n';
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto row = proba.row(static_cast<Eigen::Index>(i));
    out << EscapeField(docs[i].id) << '\t' << classes[ArgMax(row)];
    for (Eigen::Index c = 0; c < row.size(); ++c) out << '\t' << Format17(row(c));
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> Raws(const std::vector<LabeledDocument>& docs) {
  std::vector<std::string> raws;
  raws.reserve(docs.size());
  for (const auto& d : docs) raws.push_back(d.raw_text);
  return raws;
}

void EmitOutput(const std::string& path, const std::string& content,
                std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    WriteTextFile(path, content);
  }
}

// id -> predicted label from a prediction table.
std::map<std::string, std::string> ReadPredictions(const std::string& path) {
  auto in = OpenInput(path, "prediction file");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("id\tlabel", 0) != 0) {
        throw ParseError("expected prediction header 'id<TAB>label...'", 1);
      }
      continue;
    }
    if (line.empty()) continue;
    const auto cells = SplitString(line, '\t');
    if (cells.size() < 2) throw ParseError("expected id and label", line_no);
    if (!out.emplace(UnescapeField(cells[0]), cells[1]).second) {
      throw ParseError("duplicate id '" + cells[0] + "'", line_no);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands.

int Train(const GlobalFlags& flags, const SettingStore& store,
          const std::string& out_dir, std::ostream& out) {
  const RunSettings s = ResolveSettings(flags, store);
  const Dataset data = LoadTaskData(s);
  const PipelineResources resources = LoadResources(s);
  OutputLock lock(out_dir);
  const TextPipeline pipeline =
      TextPipeline::Train(data, s.options, resources, flags.jobs);
  pipeline.Save(out_dir);
  WriteTextFile(fs::path(out_dir) / "effective.cfg", EffectiveConfig(s));

  std::vector<std::string> raws, truth;
  SplitExamples(data, raws, truth);
  const auto report =
      MacroF1(truth, pipeline.Predict(raws, flags.jobs), pipeline.classes());
  std::ostringstream r;
  r << "task\t" << ToString(s.options.task) << '\n';
  r << "model\t" << ToString(s.options.model) << '\n';
  r << "documents\t" << data.size() << '\n';
  r << "features\t" << pipeline.feature_names().size() << '\n';
  for (const auto& [label, n] : ClassCounts(data)) {
    r << "count_" << label << '\t' << n << '\n';
  }
  r << "# training-set fit\n";
  WriteEvalReport(r, report);
  WriteTextFile(fs::path(out_dir) / "train_report.tsv", r.str());
  out << "trained " << ToString(s.options.model) << " on " << data.size()
      << " documents; training macro_f1 = " << Format6(report.macro_f1) << '\n';
  return 0;
}

int Predict(const GlobalFlags& flags, const std::string& model_dir,
            const std::string& in_path, const std::string& out_path,
            std::ostream& out) {
  if (model_dir.empty()) throw ValidationError("missing --model");
  const TextPipeline pipeline = TextPipeline::Load(model_dir);
  const auto docs = ReadCorpusFile(in_path);
  const Matrix proba = pipeline.PredictProba(Raws(docs), flags.jobs);
  EmitOutput(out_path, PredictionTable(docs, pipeline.classes(), proba), out);
  return 0;
}

int Eval(const GlobalFlags& flags, const SettingStore& store,
         const std::string& model_dir, const std::string& pred_path,
         const std::string& out_path, std::ostream& out) {
  RunSettings s = ResolveSettings(flags, store);
  if (model_dir.empty() == pred_path.empty()) {
    throw ValidationError("give exactly one of --model and --pred");
  }
  std::optional<TextPipeline> pipeline;
  if (!model_dir.empty()) {
    pipeline = TextPipeline::Load(model_dir);
    bool task_given = false;
    for (const auto& [key, value] : store.Given()) task_given |= key == "task";
    if (!task_given) s.options.task = pipeline->options().task;
  }
  const Dataset gold = LoadTaskData(s);
  std::vector<std::string> raws, truth, pred;
  SplitExamples(gold, raws, truth);
  std::vector<std::string> classes = TaskClasses(s.options.task);
  if (pipeline) {
    pred = pipeline->Predict(raws, flags.jobs);
    classes = pipeline->classes();
  } else {
    const auto table = ReadPredictions(pred_path);
    for (const auto& ex : gold) {
      const auto it = table.find(ex.doc.id);
      if (it == table.end()) {
        throw ValidationError("no prediction for document '" + ex.doc.id + "'");
      }
      pred.push_back(it->second);
    }
  }
  const EvalReport report = MacroF1(truth, pred, classes);
  std::ostringstream r;
  WriteEvalReport(r, report);
  EmitOutput(out_path, r.str(), out);
  if (!out_path.empty() && out_path != "-") {
    out << "macro_f1\t" << Format6(report.macro_f1) << '\n';
  }
  return 0;
}

struct AblateArgs {
  std::string out;
  std::string models = "forest";
  std::string bases = "tfidf,embedding";
  std::string features = "off,on";
  std::string samplings = "balanced";
  bool no_norm_compare = false;
};

int Ablate(const GlobalFlags& flags, const SettingStore& store,
           const AblateArgs& a, std::ostream& out) {
  const RunSettings s = ResolveSettings(flags, store);
  AblationGrid grid;
  grid.models = ParseModelList(a.models);
  grid.bases = ParseBaseList(a.bases);
  grid.features = ParseFeatureList(a.features);
  grid.samplings = ParseSamplingList(a.samplings);
  grid.normalization_comparison = !a.no_norm_compare;
  const Dataset data = LoadTaskData(s);
  const PipelineResources resources = LoadResources(s);
  OutputLock lock(a.out);
  const DatasetSplit split =
      StratifiedSplit(data, SplitFractions{}, DeriveSeed(s.options.seed, 4));
  const AblationReport report =
      RunAblation(grid, split, s.options, resources, flags.jobs);
  std::ostringstream matrix, detail;
  WriteAblationMatrix(matrix, report);
  WriteAblationDetail(detail, report);
  WriteTextFile(fs::path(a.out) / "ablation.tsv", matrix.str());
  WriteTextFile(fs::path(a.out) / "ablation_detail.txt", detail.str());
  WriteTextFile(fs::path(a.out) / "effective.cfg", EffectiveConfig(s));
  out << matrix.str();
  return 0;
}

struct EnsembleArgs {
  std::vector<std::string> members;
  std::string weights;
  std::string spec;
  std::string write_spec;
  std::string in;
  std::string out;
};

int EnsembleCommand(const GlobalFlags& flags, const EnsembleArgs& a,
                    std::ostream& out) {
  EnsembleSpec spec;
  if (!a.spec.empty()) {
    if (!a.members.empty() || !a.weights.empty()) {
      throw ValidationError("--spec cannot be combined with --member/--weights");
    }
    spec = ReadEnsembleSpecFile(a.spec);
  } else {
    if (a.members.empty()) throw ValidationError("give --spec or --member");
    for (const auto& m : a.members) spec.members.push_back(fs::absolute(m).string());
    if (!a.weights.empty()) {
      std::ostringstream text;
      for (const auto& m : spec.members) text << "member = " << m << '\n';
      text << "weights = " << a.weights << '\n';
      std::istringstream in(text.str());
      spec = ReadEnsembleSpec(in);
    }
  }
  if (a.write_spec.empty() && a.in.empty()) {
    throw ValidationError("nothing to do: give --write-spec and/or --in");
  }
  const Ensemble ensemble = Ensemble::Load(spec);
  if (!a.write_spec.empty()) {
    std::ostringstream text;
    WriteEnsembleSpec(text, spec);
    WriteTextFile(a.write_spec, text.str());
  }
  if (!a.in.empty()) {
    const auto docs = ReadCorpusFile(a.in);
    const Matrix proba = ensemble.PredictProba(Raws(docs), flags.jobs);
    EmitOutput(a.out, PredictionTable(docs, ensemble.classes(), proba), out);
  }
  return 0;
}

int Kappa(const std::string& path, const std::string& format,
          const std::string& method, std::ostream& out) {
  auto in = OpenInput(path, "ratings file");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    const std::string_view t = TrimAscii(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(SplitString(line, '\t'));
  }
  if (rows.empty()) throw ValidationError("ratings file has no items");
  AgreementReport report;
  if (method == "cohen") {
    if (format != "labels") throw ValidationError("cohen needs --format labels");
    std::vector<std::string> r1, r2;
    for (const auto& row : rows) {
      if (row.size() != 2) throw ValidationError("cohen needs exactly 2 raters per item");
      r1.push_back(row[0]);
      r2.push_back(row[1]);
    }
    report = CohenKappa(r1, r2);
  } else if (method == "fleiss") {
    std::vector<std::vector<std::size_t>> counts;
    if (format == "counts") {
      for (const auto& row : rows) {
        std::vector<std::size_t> c;
        for (const auto& cell : row) {
          char* end = nullptr;
          const long long v = std::strtoll(cell.c_str(), &end, 10);
          if (cell.empty() || *end != '\0' || v < 0) {
            throw ValidationError("bad rating count '" + cell + "'");
          }
          c.push_back(static_cast<std::size_t>(v));
        }
        counts.push_back(std::move(c));
      }
    } else if (format == "labels") {
      std::set<std::string> categories;
      for (const auto& row : rows) categories.insert(row.begin(), row.end());
      const std::vector<std::string> cats(categories.begin(), categories.end());
      for (const auto& row : rows) {
        std::vector<std::size_t> c(cats.size(), 0);
        for (const auto& label : row) {
          ++c[static_cast<std::size_t>(
              std::lower_bound(cats.begin(), cats.end(), label) - cats.begin())];
        }
        counts.push_back(std::move(c));
      }
    } else {
      throw ValidationError("unknown --format '" + format + "'");
    }
    report = FleissKappa(counts);
  } else {
    throw ValidationError("unknown --method '" + method + "'");
  }
  out << "kappa = " << Format6(report.kappa) << '\n';
  out << "observed = " << Format6(report.observed) << '\n';
  out << "expected = " << Format6(report.expected) << '\n';
  out << "raters = " << report.raters << '\n';
  out << "items = " << report.items << '\n';
  return 0;
}

int CorpusStats(const std::string& path, std::ostream& out) {
  if (path.empty()) throw ValidationError("missing --data");
  const auto docs = ReadCorpusFile(path);
  std::size_t tokens = 0;
  std::map<std::string, std::size_t> sources;
  for (const auto& d : docs) {
    std::istringstream words(d.raw_text);
    std::string w;
    while (words >> w) ++tokens;
    ++sources[d.source];
  }
  out << "statistic\tvalue\n";
  out << "documents\t" << docs.size() << '\n';
  out << "tokens\t" << tokens << '\n';
  out << "mean_tokens\t"
      << Format6(docs.empty() ? 0.0
                              : static_cast<double>(tokens) /
                                    static_cast<double>(docs.size()))
      << '\n';
  for (const auto& [src, n] : sources) out << "source_" << src << '\t' << n << '\n';
  for (Task task : {Task::k5A, Task::k6A, Task::k6B, Task::k6C}) {
    const auto counts = ClassCounts(MakeTaskDataset(docs, task));
    for (const auto& label : TaskClasses(task)) {
      const auto it = counts.find(label);
      out << ToString(task) << '_' << label << '\t'
          << (it == counts.end() ? 0 : it->second) << '\n';
    }
  }
  return 0;
}

}  // namespace

std::string DefaultDataDir() {
  if (const char* env = std::getenv("OFFLANG_DATA_DIR"); env && *env) return env;
  return OFFLANG_DATA_DIR;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"offlang: offensive-language classification toolkit", "offlang"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  flags.seed_option = app.add_option("--seed", flags.seed, "random seed (default 42)");
  app.add_option("--jobs", flags.jobs, "worker threads (default 1)")
      ->check(CLI::Range(1, 1024));
  app.add_flag("--no-normalize", flags.no_normalize,
               "feed raw whitespace tokens to every component");
  app.add_option("--config", flags.config, "key = value settings file");

  std::vector<std::string> setting_keys;
  for (const auto& k : PipelineOptionKeys()) {
    if (k != "seed") setting_keys.push_back(k);
  }
  for (const auto& k : ResourceKeys()) setting_keys.push_back(k);

  std::function<int()> action;

  SettingStore train_store;
  std::string train_out;
  auto* train = app.add_subcommand("train", "fit a pipeline and save it");
  train_store.AddOptions(train, setting_keys);
  train->add_option("--out", train_out, "model directory")->required();
  train->callback([&] {
    action = [&] { return Train(flags, train_store, train_out, out); };
  });

  std::string model_dir, predict_in, predict_out;
  auto* predict = app.add_subcommand("predict", "label documents with a saved model");
  predict->add_option("--model", model_dir, "model directory")->required();
  predict->add_option("--in", predict_in, "documents to label")->required();
  predict->add_option("--out", predict_out, "output TSV (default stdout)");
  predict->callback([&] {
    action = [&] { return Predict(flags, model_dir, predict_in, predict_out, out); };
  });

  SettingStore eval_store;
  std::string eval_model, eval_pred, eval_out;
  auto* eval = app.add_subcommand("eval", "score a model or prediction file");
  eval_store.AddOptions(eval, {"task", "data"});
  eval->add_option("--model", eval_model, "model directory");
  eval->add_option("--pred", eval_pred, "prediction TSV from predict");
  eval->add_option("--out", eval_out, "report file (default stdout)");
  eval->callback([&] {
    action = [&] {
      return Eval(flags, eval_store, eval_model, eval_pred, eval_out, out);
    };
  });

  SettingStore ablate_store;
  AblateArgs ablate_args;
  auto* ablate = app.add_subcommand("ablate", "run the ablation grid");
  ablate_store.AddOptions(ablate, setting_keys);
  ablate->add_option("--out", ablate_args.out, "report directory")->required();
  ablate->add_option("--models", ablate_args.models, "e.g. forest,svm,logreg");
  ablate->add_option("--bases", ablate_args.bases, "e.g. tfidf,embedding,none");
  ablate->add_option("--features", ablate_args.features, "e.g. off,on");
  ablate->add_option("--samplings", ablate_args.samplings,
                     "e.g. balanced,full,unbalanced");
  ablate->add_flag("--no-norm-compare", ablate_args.no_norm_compare,
                   "skip the normalization on/off rerun");
  ablate->callback([&] {
    action = [&] { return Ablate(flags, ablate_store, ablate_args, out); };
  });

  EnsembleArgs ens_args;
  auto* ensemble = app.add_subcommand("ensemble", "build an ensemble spec and/or vote");
  ensemble->add_option("--member", ens_args.members, "member model directory");
  ensemble->add_option("--weights", ens_args.weights, "space-separated weights");
  ensemble->add_option("--spec", ens_args.spec, "existing ensemble spec");
  ensemble->add_option("--write-spec", ens_args.write_spec, "spec file to write");
  ensemble->add_option("--in", ens_args.in, "documents to label");
  ensemble->add_option("--out", ens_args.out, "output TSV (default stdout)");
  ensemble->callback([&] {
    action = [&] { return EnsembleCommand(flags, ens_args, out); };
  });

  std::string ratings, kappa_format = "labels", kappa_method = "fleiss";
  auto* kappa = app.add_subcommand("kappa", "inter-annotator agreement");
  kappa->add_option("--ratings", ratings,
                    "one item per line: rater labels (or category counts)")
      ->required();
  kappa->add_option("--format", kappa_format, "labels or counts");
  kappa->add_option("--method", kappa_method, "fleiss or cohen");
  kappa->callback([&] {
    action = [&] { return Kappa(ratings, kappa_format, kappa_method, out); };
  });

  std::string stats_data;
  auto* stats = app.add_subcommand("corpus-stats", "document and label counts");
  stats->add_option("--data", stats_data, "corpus file")->required();
  stats->callback([&] { action = [&] { return CorpusStats(stats_data, out); }; });

  std::vector<std::string> argv_store;
  argv_store.push_back("offlang");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    return action ? action() : 1;
  } catch (const offlang::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace offlang
