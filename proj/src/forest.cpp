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

#include "offlang/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace offlang {
namespace {

constexpr std::uint64_t kForestStream = 0xf0e5;
constexpr double kGainEps = 1e-12;

double Gini(const std::vector<double>& counts, double n) {
  if (n <= 0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += c * c;
  return 1.0 - s / (n * n);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<std::size_t>& y,
              std::size_t classes, const ForestConfig& config, Rng& rng)
      : x_(x), y_(y), k_(classes), config_(config), rng_(rng) {
    const auto d = static_cast<std::size_t>(x.cols());
    features_.resize(d);
    std::iota(features_.begin(), features_.end(), 0);
    mtry_ = config.max_features > 0
                ? std::min<std::size_t>(d, static_cast<std::size_t>(config.max_features))
                : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    mtry_ = std::max<std::size_t>(mtry_, 1);
  }

  DecisionTree Build(std::vector<std::size_t> samples) {
    struct Work {
      int node;
      std::vector<std::size_t> samples;
      int depth;
    };
    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<Work> stack;
    stack.push_back({0, std::move(samples), 0});
    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      std::vector<double> counts(k_, 0.0);
      for (std::size_t s : w.samples) counts[y_[s]] += 1.0;
      const double n = static_cast<double>(w.samples.size());
      const double impurity = Gini(counts, n);
      Split split;
      const bool can_split =
          impurity > 0 &&
          (config_.max_depth <= 0 || w.depth < config_.max_depth) &&
          w.samples.size() >= 2 * static_cast<std::size_t>(
                                      std::max(config_.min_samples_leaf, 1));
      if (can_split) split = FindSplit(w.samples, counts, impurity);
      if (split.feature < 0) {
        TreeNode& leaf = tree.nodes[w.node];
        leaf.distribution.resize(k_);
        for (std::size_t c = 0; c < k_; ++c) leaf.distribution[c] = counts[c] / n;
        continue;
      }
      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (std::size_t s : w.samples) {
        (x_(s, split.feature) <= split.threshold ? left : right).push_back(s);
      }
      const int li = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      const int ri = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[w.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = li;
      node.right = ri;
      stack.push_back({ri, std::move(right), w.depth + 1});
      stack.push_back({li, std::move(left), w.depth + 1});
    }
    return tree;
  }

 private:
  // Best split over a random feature subset; if none of the subset can split
  // the node, further features are drawn until one can or all are used.
  Split FindSplit(const std::vector<std::size_t>& samples,
                  const std::vector<double>& counts, double impurity) {
    const std::size_t d = features_.size();
    Split best;
    std::size_t drawn = 0;
    while (drawn < d) {
      const std::size_t batch_end = drawn == 0 ? std::min(mtry_, d) : drawn + 1;
      for (std::size_t i = drawn; i < batch_end; ++i) {
        std::swap(features_[i], features_[i + rng_.Index(d - i)]);
      }
      std::vector<std::size_t> batch(features_.begin() + static_cast<std::ptrdiff_t>(drawn),
                                     features_.begin() + static_cast<std::ptrdiff_t>(batch_end));
      std::sort(batch.begin(), batch.end());
      drawn = batch_end;
      for (std::size_t f : batch) {
        ScanFeature(static_cast<int>(f), samples, counts, impurity, best);
      }
      if (best.feature >= 0) break;
    }
    return best;
  }

  void Consider(Split& best, int feature, double threshold, double gain) {
    if (gain < -kGainEps) return;
    const bool better =
        best.feature < 0 || gain > best.gain + kGainEps ||
        (gain >= best.gain - kGainEps &&
         (feature < best.feature ||
          (feature == best.feature && threshold < best.threshold)));
    if (better) best = {feature, threshold, gain};
  }

  void ScanFeature(int f, const std::vector<std::size_t>& samples,
                   const std::vector<double>& counts, double impurity,
                   Split& best) {
    // Zeros are common (tf-idf); only non-zero values are sorted.
    std::vector<std::pair<double, std::size_t>> values;
    std::vector<double> zero_counts(k_, 0.0);
    double zeros = 0;
    for (std::size_t s : samples) {
      const double v = x_(s, f);
      if (v == 0.0) {
        zero_counts[y_[s]] += 1.0;
        ++zeros;
      } else {
        values.emplace_back(v, y_[s]);
      }
    }
    std::sort(values.begin(), values.end());
    const auto neg_end = static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(),
                         std::make_pair(0.0, std::size_t{0})) -
        values.begin());

    const double n = static_cast<double>(samples.size());
    const double min_leaf = std::max(config_.min_samples_leaf, 1);
    std::vector<double> left(k_, 0.0);
    double n_left = 0;
    auto evaluate = [&](double a, double b) {
      if (n_left < min_leaf || n - n_left < min_leaf) return;
      std::vector<double> right(k_);
      for (std::size_t c = 0; c < k_; ++c) right[c] = counts[c] - left[c];
      const double weighted =
          (n_left * Gini(left, n_left) + (n - n_left) * Gini(right, n - n_left)) / n;
      double threshold = a + (b - a) / 2;
      if (!(threshold >= a && threshold < b)) threshold = a;
      Consider(best, f, threshold, impurity - weighted);
    };
    // Walk the values in ascending order: negatives, the zero block,
    // positives. A boundary exists between consecutive distinct values.
    bool have_prev = false;
    double prev = 0.0;
    auto step = [&](double v) {
      if (have_prev && v != prev) evaluate(prev, v);
      have_prev = true;
      prev = v;
    };
    for (std::size_t i = 0; i < neg_end; ++i) {
      step(values[i].first);
      left[values[i].second] += 1.0;
      ++n_left;
    }
    if (zeros > 0) {
      step(0.0);
      for (std::size_t c = 0; c < k_; ++c) left[c] += zero_counts[c];
      n_left += zeros;
    }
    for (std::size_t i = neg_end; i < values.size(); ++i) {
      step(values[i].first);
      left[values[i].second] += 1.0;
      ++n_left;
    }
  }

  const Matrix& x_;
  const std::vector<std::size_t>& y_;
  std::size_t k_;
  const ForestConfig& config_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::size_t mtry_;
};

}  // namespace

const std::vector<double>& DecisionTree::Leaf(const double* row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    i = static_cast<std::size_t>(row[nodes[i].feature] <= nodes[i].threshold
                                     ? nodes[i].left
                                     : nodes[i].right);
  }
  return nodes[i].distribution;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature >= 0) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
    best = std::max(best, d[i]);
  }
  return best;
}

RandomForest::RandomForest(std::vector<std::string> classes,
                           std::size_t feature_dim, ForestConfig config,
                           std::vector<DecisionTree> trees)
    : ProbabilisticClassifier(std::move(classes), feature_dim),
      config_(config),
      trees_(std::move(trees)) {
  if (trees_.empty()) throw ValidationError("forest without trees");
  for (const auto& t : trees_) {
    for (const auto& node : t.nodes) {
      if (node.feature < 0 && node.distribution.size() != this->classes().size()) {
        throw ValidationError("leaf distribution does not match class count");
      }
      if (node.feature >= static_cast<int>(feature_dim)) {
        throw ValidationError("tree splits on a feature out of range");
      }
    }
  }
}

Matrix RandomForest::ProbaImpl(const Matrix& x) const {
  const auto k = static_cast<Eigen::Index>(classes().size());
  Matrix p = Matrix::Zero(x.rows(), k);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double* row = x.data() + i * x.cols();
    for (const auto& t : trees_) {
      const auto& dist = t.Leaf(row);
      for (Eigen::Index c = 0; c < k; ++c) p(i, c) += dist[c];
    }
  }
  p /= static_cast<double>(trees_.size());
  return p;
}

void RandomForest::SaveBody(std::ostream& out) const {
  out << "config " << config_.trees << ' ' << config_.max_depth << ' '
      << config_.min_samples_leaf << ' ' << config_.max_features << ' '
      << (config_.bootstrap ? 1 : 0) << ' ' << config_.seed << '\n';
  out << "trees " << trees_.size() << '\n';
  for (const auto& t : trees_) {
    out << "nodes " << t.nodes.size() << '\n';
    for (const auto& node : t.nodes) {
      if (node.feature >= 0) {
        out << node.feature << ' ' << FormatExact(node.threshold) << ' '
            << node.left << ' ' << node.right << '\n';
      } else {
        out << "-1";
        for (double v : node.distribution) out << ' ' << FormatExact(v);
        out << '\n';
      }
    }
  }
}

std::unique_ptr<RandomForest> RandomForest::LoadBody(
    std::istream& in, std::vector<std::string> classes,
    std::size_t feature_dim) {
  ForestConfig config;
  {
    const auto cells = SplitString(ReadField(in, "config"), ' ');
    if (cells.size() != 6) throw ParseError("malformed forest config");
    config.trees = std::stoi(cells[0]);
    config.max_depth = std::stoi(cells[1]);
    config.min_samples_leaf = std::stoi(cells[2]);
    config.max_features = std::stoi(cells[3]);
    config.bootstrap = cells[4] == "1";
    config.seed = std::stoull(cells[5]);
  }
  const std::size_t n_trees = std::stoul(ReadField(in, "trees"));
  std::vector<DecisionTree> trees(n_trees);
  std::string line;
  for (auto& t : trees) {
    const std::size_t n_nodes = std::stoul(ReadField(in, "nodes"));
    t.nodes.resize(n_nodes);
    for (auto& node : t.nodes) {
      if (!ReadLine(in, line)) throw ParseError("forest file truncated");
      const auto cells = SplitString(line, ' ');
      node.feature = std::stoi(cells.at(0));
      if (node.feature >= 0) {
        if (cells.size() != 4) throw ParseError("malformed split node");
        node.threshold = ParseExact(cells[1]);
        node.left = std::stoi(cells[2]);
        node.right = std::stoi(cells[3]);
        if (node.left <= 0 || node.right <= 0 ||
            static_cast<std::size_t>(std::max(node.left, node.right)) >= n_nodes) {
          throw ParseError("split node child out of range");
        }
      } else {
        for (std::size_t c = 1; c < cells.size(); ++c) {
          node.distribution.push_back(ParseExact(cells[c]));
        }
      }
    }
  }
  return std::make_unique<RandomForest>(std::move(classes), feature_dim, config,
                                        std::move(trees));
}

std::unique_ptr<RandomForest> TrainRandomForest(
    const Matrix& x, const std::vector<std::string>& y,
    const ForestConfig& config, std::vector<std::string> classes) {
  if (x.rows() < 2) throw ValidationError("forest needs at least 2 samples");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ValidationError("feature rows and labels differ in count");
  }
  if (x.cols() == 0) throw ValidationError("forest needs at least 1 feature");
  if (config.trees < 1) throw ValidationError("forest needs at least 1 tree");
  CheckFinite(x);
  const std::vector<std::size_t> labels = EncodeLabels(y, classes);
  const std::size_t n = y.size();
  std::vector<DecisionTree> trees(static_cast<std::size_t>(config.trees));
  ParallelFor(trees.size(), config.jobs, [&](std::size_t t) {
    Rng rng(DeriveSeed(config.seed, kForestStream, t));
    std::vector<std::size_t> samples(n);
    if (config.bootstrap) {
      for (auto& s : samples) s = rng.Index(n);
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    TreeBuilder builder(x, labels, classes.size(), config, rng);
    trees[t] = builder.Build(std::move(samples));
  });
  return std::make_unique<RandomForest>(std::move(classes),
                                        static_cast<std::size_t>(x.cols()),
                                        config, std::move(trees));
}

}  // namespace offlang
