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

#include "offlang/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace offlang {
namespace {

constexpr std::uint64_t kSamplingStream = 1;
constexpr std::uint64_t kModelStream = 2;
constexpr std::uint64_t kEmbeddingStream = 3;

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

long long ParseInteger(std::string_view key, std::string_view value) {
  const std::string s(value);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size()) {
    throw ValidationError("'" + std::string(key) + "' needs an integer, got '" +
                          s + "'");
  }
  return v;
}

std::uint64_t ParseUnsigned(std::string_view key, std::string_view value) {
  const long long v = ParseInteger(key, value);
  if (v < 0) {
    throw ValidationError("'" + std::string(key) + "' must be non-negative");
  }
  return static_cast<std::uint64_t>(v);
}

int ParseInt(std::string_view key, std::string_view value) {
  return static_cast<int>(ParseInteger(key, value));
}

double ParseReal(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) {
    throw ValidationError("'" + std::string(key) + "' needs a number, got '" +
                          s + "'");
  }
  return v;
}

struct OptionField {
  std::string key;
  std::function<void(PipelineOptions&, std::string_view)> set;
  std::function<std::string(const PipelineOptions&)> get;
};

const std::vector<OptionField>& Fields() {
  using O = PipelineOptions;
  using V = std::string_view;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  static const std::vector<OptionField> fields = {
      {"task", [](O& o, V v) { o.task = ParseTask(v); },
       [](const O& o) { return std::string(ToString(o.task)); }},
      {"model", [](O& o, V v) { o.model = ParseModelKind(v); },
       [](const O& o) { return std::string(ToString(o.model)); }},
      {"sampling", [](O& o, V v) { o.sampling = ParseSamplingMode(v); },
       [](const O& o) { return std::string(ToString(o.sampling)); }},
      {"max_ratio",
       [](O& o, V v) {
         o.max_ratio = ParseReal("max_ratio", v);
         if (!(o.max_ratio >= 1)) throw ValidationError("max_ratio must be >= 1");
       },
       [](const O& o) { return Num(o.max_ratio); }},
      {"seed", [](O& o, V v) { o.seed = ParseUnsigned("seed", v); },
       [](const O& o) { return std::to_string(o.seed); }},
      {"base", [](O& o, V v) { ApplyFeatureKey(o.features, "base", v); },
       [](const O& o) { return std::string(ToString(o.features.base)); }},
      {"graphemic", [](O& o, V v) { ApplyFeatureKey(o.features, "graphemic", v); },
       [b](const O& o) { return b(o.features.blocks.graphemic); }},
      {"blacklist", [](O& o, V v) { ApplyFeatureKey(o.features, "blacklist", v); },
       [b](const O& o) { return b(o.features.blocks.lexicon); }},
      {"perplexity",
       [](O& o, V v) { ApplyFeatureKey(o.features, "perplexity", v); },
       [b](const O& o) { return b(o.features.blocks.perplexity); }},
      {"normalize", [](O& o, V v) { ApplyFeatureKey(o.features, "normalize", v); },
       [b](const O& o) { return b(o.features.normalize); }},
      {"sublinear_tf",
       [](O& o, V v) { ApplyFeatureKey(o.features, "sublinear_tf", v); },
       [b](const O& o) { return b(o.features.tfidf.sublinear_tf); }},
      {"smooth_idf",
       [](O& o, V v) { ApplyFeatureKey(o.features, "smooth_idf", v); },
       [b](const O& o) { return b(o.features.tfidf.smooth_idf); }},
      {"l2_normalize",
       [](O& o, V v) { ApplyFeatureKey(o.features, "l2_normalize", v); },
       [b](const O& o) { return b(o.features.tfidf.l2_normalize); }},
      {"min_df", [](O& o, V v) { ApplyFeatureKey(o.features, "min_df", v); },
       [](const O& o) { return std::to_string(o.features.tfidf.min_df); }},
      {"max_terms", [](O& o, V v) { ApplyFeatureKey(o.features, "max_terms", v); },
       [](const O& o) { return std::to_string(o.features.tfidf.max_features); }},
      {"trees", [](O& o, V v) { o.forest.trees = ParseInt("trees", v); },
       [](const O& o) { return std::to_string(o.forest.trees); }},
      {"max_depth", [](O& o, V v) { o.forest.max_depth = ParseInt("max_depth", v); },
       [](const O& o) { return std::to_string(o.forest.max_depth); }},
      {"min_leaf",
       [](O& o, V v) { o.forest.min_samples_leaf = ParseInt("min_leaf", v); },
       [](const O& o) { return std::to_string(o.forest.min_samples_leaf); }},
      {"max_features",
       [](O& o, V v) { o.forest.max_features = ParseInt("max_features", v); },
       [](const O& o) { return std::to_string(o.forest.max_features); }},
      {"bootstrap", [](O& o, V v) { o.forest.bootstrap = ParseBool(v); },
       [b](const O& o) { return b(o.forest.bootstrap); }},
      {"svm_lambda", [](O& o, V v) { o.svm.lambda = ParseReal("svm_lambda", v); },
       [](const O& o) { return Num(o.svm.lambda); }},
      {"svm_epochs", [](O& o, V v) { o.svm.epochs = ParseInt("svm_epochs", v); },
       [](const O& o) { return std::to_string(o.svm.epochs); }},
      {"calibration_folds",
       [](O& o, V v) {
         o.svm.calibration_folds = ParseInt("calibration_folds", v);
       },
       [](const O& o) { return std::to_string(o.svm.calibration_folds); }},
      {"logreg_l2", [](O& o, V v) { o.logistic.l2 = ParseReal("logreg_l2", v); },
       [](const O& o) { return Num(o.logistic.l2); }},
      {"logreg_iterations",
       [](O& o, V v) {
         o.logistic.max_iterations = ParseInt("logreg_iterations", v);
       },
       [](const O& o) { return std::to_string(o.logistic.max_iterations); }},
      {"lm_order", [](O& o, V v) { o.lm.order = ParseInt("lm_order", v); },
       [](const O& o) { return std::to_string(o.lm.order); }},
      {"lm_alpha", [](O& o, V v) { o.lm.alpha = ParseReal("lm_alpha", v); },
       [](const O& o) { return Num(o.lm.alpha); }},
      {"emb_dim", [](O& o, V v) { o.skipgram.dim = ParseInt("emb_dim", v); },
       [](const O& o) { return std::to_string(o.skipgram.dim); }},
      {"emb_window", [](O& o, V v) { o.skipgram.window = ParseInt("emb_window", v); },
       [](const O& o) { return std::to_string(o.skipgram.window); }},
      {"emb_negatives",
       [](O& o, V v) { o.skipgram.negatives = ParseInt("emb_negatives", v); },
       [](const O& o) { return std::to_string(o.skipgram.negatives); }},
      {"emb_epochs", [](O& o, V v) { o.skipgram.epochs = ParseInt("emb_epochs", v); },
       [](const O& o) { return std::to_string(o.skipgram.epochs); }},
      {"emb_lr",
       [](O& o, V v) { o.skipgram.learning_rate = ParseReal("emb_lr", v); },
       [](const O& o) { return Num(o.skipgram.learning_rate); }},
      {"emb_min_count",
       [](O& o, V v) { o.skipgram.min_count = ParseInt("emb_min_count", v); },
       [](const O& o) { return std::to_string(o.skipgram.min_count); }},
      {"emb_min_n",
       [](O& o, V v) { o.skipgram.subwords.min_n = ParseInt("emb_min_n", v); },
       [](const O& o) { return std::to_string(o.skipgram.subwords.min_n); }},
      {"emb_max_n",
       [](O& o, V v) { o.skipgram.subwords.max_n = ParseInt("emb_max_n", v); },
       [](const O& o) { return std::to_string(o.skipgram.subwords.max_n); }},
      {"emb_buckets",
       [](O& o, V v) {
         o.skipgram.subwords.buckets = ParseUnsigned("emb_buckets", v);
       },
       [](const O& o) { return std::to_string(o.skipgram.subwords.buckets); }},
      {"combine_k", [](O& o, V v) { o.combine.k = ParseInt("combine_k", v); },
       [](const O& o) { return std::to_string(o.combine.k); }},
  };
  return fields;
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return in;
}

void WriteFile(const std::filesystem::path& path,
               const std::function<void(std::ostream&)>& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void AddPhrases(Lexicon& lexicon, const Normalizer& normalizer,
                const std::vector<std::pair<std::string, Tier>>& phrases) {
  for (const auto& [phrase, tier] : phrases) {
    std::vector<std::string> tokens;
    for (const auto& t : normalizer.Normalize(phrase).tokens) {
      std::string core = TokenCore(t);
      if (!core.empty()) tokens.push_back(std::move(core));
    }
    if (tokens.empty()) {
      throw ValidationError("lexicon phrase '" + phrase +
                            "' normalizes to nothing");
    }
    lexicon.Add(std::move(tokens), tier);
  }
}

}  // namespace

const std::vector<std::string>& PipelineOptionKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void ApplyPipelineOption(PipelineOptions& options, std::string_view key,
                         std::string_view value) {
  for (const auto& f : Fields()) {
    if (f.key == key) {
      f.set(options, value);
      return;
    }
  }
  throw ValidationError("unknown option '" + std::string(key) + "'");
}

void WritePipelineOptions(std::ostream& out, const PipelineOptions& options) {
  for (const auto& f : Fields()) out << f.key << " = " << f.get(options) << '\n';
}

PipelineOptions ReadPipelineOptions(std::istream& in) {
  PipelineOptions options;
  for (const auto& [key, value] : ReadKeyValues(in)) {
    ApplyPipelineOption(options, key, value);
  }
  return options;
}

std::vector<std::pair<std::string, Tier>> ReadLexiconPhrases(std::istream& in) {
  std::vector<std::pair<std::string, Tier>> out;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    if (TrimAscii(line).empty() || line[0] == '#') continue;
    if (!IsValidUtf8(line)) throw ParseError("invalid UTF-8", line_no);
    const auto cells = SplitString(line, '\t');
    if (cells.size() != 2) throw ParseError("expected `tier<TAB>phrase`", line_no);
    const std::string_view tier = TrimAscii(cells[0]);
    if (tier == "OFFENSIVE") {
      out.emplace_back(cells[1], Tier::kOffensive);
    } else if (tier == "CONTEXTUAL") {
      out.emplace_back(cells[1], Tier::kContextual);
    } else {
      throw ParseError("unknown tier '" + std::string(tier) + "'", line_no);
    }
  }
  return out;
}

std::vector<std::string> ReadWordList(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (ReadLine(in, line)) {
    ++line_no;
    const std::string_view w = TrimAscii(line);
    if (w.empty() || w[0] == '#') continue;
    if (!IsValidUtf8(w)) throw ParseError("invalid UTF-8", line_no);
    out.emplace_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& TextPipeline::classes() const {
  return state_->model->classes();
}

const std::vector<std::string>& TextPipeline::feature_names() const {
  return state_->assembler->names();
}

NormalizedDocument TextPipeline::Process(std::string_view raw) const {
  if (state_->options.features.normalize) return state_->normalizer.Normalize(raw);
  NormalizedDocument doc;
  doc.original = std::string(raw);
  doc.tokens = SplitWhitespace(raw);
  doc.normalized = JoinStrings(doc.tokens, " ");
  return doc;
}

Vector TextPipeline::BaseVector(const State& state,
                                const NormalizedDocument& doc) {
  switch (state.options.features.base) {
    case BaseVectorizer::kNone:
      return Vector();
    case BaseVectorizer::kTfidf:
      return state.tfidf->TransformDense(ScoredTokens(doc.tokens));
    case BaseVectorizer::kEmbedding:
      return PoolEmbedding(ScoredTokens(doc.tokens), *state.embedding);
  }
  return Vector();
}

void TextPipeline::BuildAssembler(State& state) {
  std::vector<std::string> base_names;
  if (state.tfidf) {
    for (const auto& t : state.tfidf->terms()) base_names.push_back("tfidf:" + t);
  } else if (state.embedding) {
    for (std::size_t i = 0; i < state.embedding->dim(); ++i) {
      base_names.push_back("emb_" + std::to_string(i));
    }
  }
  const FeatureBlocks& blocks = state.options.features.blocks;
  state.assembler = std::make_unique<FeatureAssembler>(
      blocks, std::move(base_names), blocks.lexicon ? &state.lexicon : nullptr,
      state.lm_off ? &*state.lm_off : nullptr,
      state.lm_clean ? &*state.lm_clean : nullptr);
}

FeatureVector TextPipeline::Featurize(std::string_view raw) const {
  const NormalizedDocument doc = Process(raw);
  return state_->assembler->Assemble(raw, doc, BaseVector(*state_, doc));
}

Matrix TextPipeline::FeatureMatrix(const std::vector<std::string>& raws,
                                   int jobs) const {
  Matrix x(static_cast<Eigen::Index>(raws.size()),
           static_cast<Eigen::Index>(state_->assembler->size()));
  ParallelFor(raws.size(), jobs, [&](std::size_t i) {
    const FeatureVector fv = Featurize(raws[i]);
    for (std::size_t j = 0; j < fv.values.size(); ++j) x(i, j) = fv.values[j];
  });
  return x;
}

Matrix TextPipeline::PredictProba(const std::vector<std::string>& raws,
                                  int jobs) const {
  return state_->model->PredictProba(FeatureMatrix(raws, jobs));
}

std::vector<std::string> TextPipeline::Predict(
    const std::vector<std::string>& raws, int jobs) const {
  return state_->model->Predict(FeatureMatrix(raws, jobs));
}

TextPipeline TextPipeline::Train(const Dataset& train,
                                 const PipelineOptions& options,
                                 const PipelineResources& resources, int jobs) {
  if (train.size() < 2) {
    throw ValidationError("training needs at least 2 labeled documents");
  }
  auto state = std::make_shared<State>();
  state->options = options;
  state->normalizer = Normalizer(resources.variants, resources.leet);
  AddPhrases(state->lexicon, state->normalizer, resources.lexicon_phrases);
  TextPipeline pipeline(state);

  std::vector<NormalizedDocument> docs(train.size());
  ParallelFor(train.size(), jobs, [&](std::size_t i) {
    docs[i] = pipeline.Process(train[i].doc.raw_text);
  });
  std::vector<std::vector<std::string>> scored(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) scored[i] = ScoredTokens(docs[i].tokens);

  const FeatureConfig& fc = options.features;
  if (fc.blocks.perplexity) {
    std::set<std::string> lexicon_words;
    for (const auto& e : state->lexicon.entries()) {
      lexicon_words.insert(e.phrase.begin(), e.phrase.end());
    }
    std::vector<std::string> off_words;
    for (const auto& w : resources.offensive_words) {
      for (auto& t : ScoredTokens(pipeline.Process(w).tokens)) off_words.push_back(t);
    }
    if (resources.offensive_words.empty()) {
      off_words.assign(lexicon_words.begin(), lexicon_words.end());
    }
    std::vector<std::string> clean_words;
    for (const auto& w : resources.clean_words) {
      for (auto& t : ScoredTokens(pipeline.Process(w).tokens)) clean_words.push_back(t);
    }
    if (resources.clean_words.empty()) {
      for (const auto& tokens : scored) {
        for (const auto& t : tokens) {
          if (!lexicon_words.count(t)) clean_words.push_back(t);
        }
      }
    }
    if (off_words.empty()) {
      throw ValidationError("perplexity features need a lexicon or an "
                            "offensive word list");
    }
    if (clean_words.empty()) {
      throw ValidationError("perplexity features need clean words");
    }
    state->lm_off = CharGramLm::Train(off_words, options.lm);
    state->lm_clean = CharGramLm::Train(clean_words, options.lm);
  }

  if (fc.base == BaseVectorizer::kTfidf) {
    state->tfidf = TfidfModel::Fit(scored, fc.tfidf);
  } else if (fc.base == BaseVectorizer::kEmbedding) {
    SkipgramConfig sg = options.skipgram;
    sg.seed = DeriveSeed(options.seed, kEmbeddingStream);
    EmbeddingMatrix own = TrainSkipgram(scored, sg).embedding;
    if (resources.external_embedding) {
      state->embedding =
          CombineEmbeddings(own, *resources.external_embedding, options.combine)
              .embedding;
    } else {
      state->embedding = std::move(own);
    }
  }
  BuildAssembler(*state);

  // Features are computed once per distinct training document; sampling
  // then selects rows.
  Matrix x_all(static_cast<Eigen::Index>(train.size()),
               static_cast<Eigen::Index>(state->assembler->size()));
  ParallelFor(train.size(), jobs, [&](std::size_t i) {
    const FeatureVector fv = state->assembler->Assemble(
        train[i].doc.raw_text, docs[i], BaseVector(*state, docs[i]));
    for (std::size_t j = 0; j < fv.values.size(); ++j) x_all(i, j) = fv.values[j];
  });

  std::vector<std::string> labels;
  labels.reserve(train.size());
  for (const auto& ex : train) labels.push_back(ex.label);
  std::vector<std::size_t> rows;
  const auto counts = ClassCounts(train);
  if (counts.size() >= 2) {
    rows = SampleIndices(labels, MakePlanForMode(counts, options.sampling,
                                                 options.max_ratio,
                                                 DeriveSeed(options.seed,
                                                            kSamplingStream)));
  } else {
    for (std::size_t i = 0; i < train.size(); ++i) rows.push_back(i);
  }
  Matrix x(static_cast<Eigen::Index>(rows.size()), x_all.cols());
  std::vector<std::string> y;
  y.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(r) = x_all.row(rows[r]);
    y.push_back(labels[rows[r]]);
  }

  const std::uint64_t model_seed = DeriveSeed(options.seed, kModelStream);
  const std::vector<std::string>& classes = TaskClasses(options.task);
  switch (options.model) {
    case ModelKind::kForest: {
      ForestConfig c = options.forest;
      c.seed = model_seed;
      c.jobs = jobs;
      state->model = TrainRandomForest(x, y, c, classes);
      break;
    }
    case ModelKind::kSvm: {
      SvmConfig c = options.svm;
      c.seed = model_seed;
      c.jobs = jobs;
      state->model = TrainLinearSvm(x, y, c, classes);
      break;
    }
    case ModelKind::kLogistic:
      state->model = TrainLogistic(x, y, options.logistic, classes);
      break;
  }
  return pipeline;
}

void TextPipeline::Save(const std::string& dir) const {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  const State& s = *state_;
  WriteFile(root / "options.cfg",
            [&](std::ostream& o) { WritePipelineOptions(o, s.options); });
  WriteFile(root / "variants.tsv",
            [&](std::ostream& o) { s.normalizer.dictionary().Write(o); });
  WriteFile(root / "leet.tsv",
            [&](std::ostream& o) { WriteLeetMap(o, s.normalizer.leet()); });
  WriteFile(root / "lexicon.tsv", [&](std::ostream& o) { s.lexicon.Write(o); });
  if (s.lm_off) {
    WriteFile(root / "lm_off.txt", [&](std::ostream& o) { s.lm_off->Save(o); });
    WriteFile(root / "lm_clean.txt",
              [&](std::ostream& o) { s.lm_clean->Save(o); });
  }
  if (s.tfidf) {
    WriteFile(root / "tfidf.txt", [&](std::ostream& o) { s.tfidf->Save(o); });
  }
  if (s.embedding) {
    WriteFile(root / "embedding.txt",
              [&](std::ostream& o) { s.embedding->SaveText(o); });
    if (s.embedding->has_subwords()) {
      WriteFile(root / "subwords.txt",
                [&](std::ostream& o) { s.embedding->SaveSubwords(o); });
    }
  }
  WriteFile(root / "features.tsv", [&](std::ostream& o) {
    for (const auto& n : s.assembler->names()) o << n << '\n';
  });
  WriteFile(root / "model.txt", [&](std::ostream& o) { s.model->Save(o); });
}

TextPipeline TextPipeline::Load(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::is_directory(root)) {
    throw ValidationError("model directory '" + dir + "' does not exist");
  }
  auto state = std::make_shared<State>();
  {
    auto in = OpenIn(root / "options.cfg");
    state->options = ReadPipelineOptions(in);
  }
  VariantDictionary variants;
  {
    auto in = OpenIn(root / "variants.tsv");
    variants = VariantDictionary::Load(in);
  }
  {
    auto in = OpenIn(root / "leet.tsv");
    state->normalizer = Normalizer(variants, LoadLeetMap(in));
  }
  {
    auto in = OpenIn(root / "lexicon.tsv");
    state->lexicon = LoadLexicon(in, state->normalizer);
  }
  const FeatureConfig& fc = state->options.features;
  if (fc.blocks.perplexity) {
    state->lm_off = CharGramLm::LoadFile((root / "lm_off.txt").string());
    state->lm_clean = CharGramLm::LoadFile((root / "lm_clean.txt").string());
  }
  if (fc.base == BaseVectorizer::kTfidf) {
    auto in = OpenIn(root / "tfidf.txt");
    state->tfidf = TfidfModel::Load(in);
  } else if (fc.base == BaseVectorizer::kEmbedding) {
    auto in = OpenIn(root / "embedding.txt");
    state->embedding = EmbeddingMatrix::LoadText(in);
    if (fs::exists(root / "subwords.txt")) {
      auto sin = OpenIn(root / "subwords.txt");
      state->embedding->LoadSubwords(sin);
    }
  }
  BuildAssembler(*state);
  state->model = ProbabilisticClassifier::LoadFile((root / "model.txt").string());
  if (state->model->feature_dim() != state->assembler->size()) {
    throw ValidationError("model expects " +
                          std::to_string(state->model->feature_dim()) +
                          " features, pipeline produces " +
                          std::to_string(state->assembler->size()));
  }
  const std::string names = Slurp(root / "features.tsv");
  std::string expected;
  for (const auto& n : state->assembler->names()) expected += n + "\n";
  if (names != expected) {
    throw ValidationError("feature names in '" + dir +
                          "' do not match the rebuilt pipeline");
  }
  return TextPipeline(state);
}

}  // namespace offlang
