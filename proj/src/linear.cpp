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

#include "offlang/linear.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace offlang {
namespace {

constexpr std::uint64_t kSvmStream = 0x5f00;
constexpr std::uint64_t kFoldStream = 0x5f01;

void CheckTrainingInput(const Matrix& x, const std::vector<std::string>& y) {
  if (x.rows() < 2) throw ValidationError("training needs at least 2 samples");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ValidationError("feature rows and labels differ in count");
  }
  CheckFinite(x);
}

double PlattObjective(const std::vector<double>& f,
                      const std::vector<double>& t, double a, double b) {
  double v = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double z = f[i] * a + b;
    v += z >= 0 ? t[i] * z + std::log1p(std::exp(-z))
                : (t[i] - 1) * z + std::log1p(std::exp(z));
  }
  return v;
}

}  // namespace

Matrix AugmentBias(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setOnes();
  return out;
}

double HingeObjective(const Vector& w, const Matrix& x, const Vector& y,
                      double lambda, Vector* grad) {
  const double n = static_cast<double>(x.rows());
  const Vector margins = (x * w).cwiseProduct(y);
  double loss = 0.5 * lambda * w.squaredNorm();
  if (grad) *grad = lambda * w;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (margins(i) < 1.0) {
      loss += (1.0 - margins(i)) / n;
      if (grad) *grad -= (y(i) / n) * x.row(i).transpose();
    }
  }
  return loss;
}

double PlattParams::Probability(double score) const {
  const double z = a * score + b;
  return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

PlattParams FitPlatt(const std::vector<double>& scores,
                     const std::vector<bool>& positive) {
  if (scores.size() != positive.size() || scores.empty()) {
    throw ValidationError("Platt fit needs matching, non-empty inputs");
  }
  double prior1 = 0;
  for (bool p : positive) prior1 += p;
  const double prior0 = static_cast<double>(scores.size()) - prior1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(scores.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = positive[i] ? hi : lo;

  PlattParams p{0.0, std::log((prior0 + 1.0) / (prior1 + 1.0))};
  double fval = PlattObjective(scores, t, p.a, p.b);
  constexpr double kSigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double z = scores[i] * p.a + p.b;
      double pr, q;
      if (z >= 0) {
        pr = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        pr = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = pr * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - pr;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= 1e-10) {
      const double na = p.a + step * da;
      const double nb = p.b + step * db;
      const double nf = PlattObjective(scores, t, na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        p = {na, nb};
        fval = nf;
        break;
      }
      step /= 2;
    }
    if (step < 1e-10) break;
  }
  if (p.a > 0) p = {0.0, std::log((prior0 + 1.0) / (prior1 + 1.0))};
  return p;
}

BinarySvm TrainBinarySvm(const Matrix& x_aug, const Vector& y,
                         const SvmConfig& config, std::uint64_t stream) {
  if (!(config.lambda > 0) || config.epochs < 1) {
    throw ValidationError("SVM needs lambda > 0 and epochs >= 1");
  }
  const auto n = static_cast<std::size_t>(x_aug.rows());
  const double radius = 1.0 / std::sqrt(config.lambda);
  Rng rng(DeriveSeed(config.seed, kSvmStream, stream));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  BinarySvm out;
  Vector w = Vector::Zero(x_aug.cols());
  Vector tail_sum = Vector::Zero(x_aug.cols());
  std::size_t tail_count = 0;
  const int tail_start = config.epochs / 2;
  // Offsetting t by 1/lambda caps the first step at 1 instead of 1/lambda.
  double t = std::max(0.0, 1.0 / config.lambda - 1.0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(order);
    Vector epoch_sum = Vector::Zero(x_aug.cols());
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * t);
      const double margin = y(i) * x_aug.row(i).dot(w);
      w *= 1.0 - eta * config.lambda;
      if (margin < 1.0) w += (eta * y(i)) * x_aug.row(i).transpose();
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      epoch_sum += w;
    }
    const Vector epoch_avg = epoch_sum / static_cast<double>(n);
    out.objective.push_back(
        HingeObjective(epoch_avg, x_aug, y, config.lambda, nullptr));
    if (epoch >= tail_start) {
      tail_sum += epoch_sum;
      tail_count += n;
    }
  }
  out.w = tail_sum / static_cast<double>(tail_count);
  return out;
}

LinearSvm::LinearSvm(std::vector<std::string> classes, std::size_t feature_dim,
                     SvmConfig config, Standardizer standardizer,
                     std::vector<BinarySvm> machines)
    : ProbabilisticClassifier(std::move(classes), feature_dim),
      config_(config),
      standardizer_(std::move(standardizer)),
      machines_(std::move(machines)) {
  const std::size_t expected = this->classes().size() == 2 ? 1 : this->classes().size();
  if (machines_.size() != expected) {
    throw ValidationError("SVM machine count does not match classes");
  }
  for (const auto& m : machines_) {
    if (static_cast<std::size_t>(m.w.size()) != feature_dim + 1) {
      throw ValidationError("SVM weight length does not match features");
    }
  }
}

Matrix LinearSvm::DecisionFunction(const Matrix& x) const {
  const Matrix xa = AugmentBias(standardizer_.Apply(x));
  Matrix scores(x.rows(), static_cast<Eigen::Index>(machines_.size()));
  for (std::size_t m = 0; m < machines_.size(); ++m) {
    scores.col(m) = xa * machines_[m].w;
  }
  return scores;
}

Matrix LinearSvm::ProbaImpl(const Matrix& x) const {
  const Matrix scores = DecisionFunction(x);
  const auto k = static_cast<Eigen::Index>(classes().size());
  Matrix p(x.rows(), k);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (machines_.size() == 1) {
      const double p1 = machines_[0].platt.Probability(scores(i, 0));
      p(i, 0) = 1.0 - p1;
      p(i, 1) = p1;
      continue;
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      p(i, c) = machines_[c].platt.Probability(scores(i, c));
      sum += p(i, c);
    }
    if (sum > 0) {
      p.row(i) /= sum;
    } else {
      p.row(i).setConstant(1.0 / static_cast<double>(k));
    }
  }
  return p;
}

void LinearSvm::SaveBody(std::ostream& out) const {
  out << "svm_config " << FormatExact(config_.lambda) << ' ' << config_.epochs
      << ' ' << config_.calibration_folds << ' ' << config_.seed << '\n';
  standardizer_.Save(out);
  out << "machines " << machines_.size() << '\n';
  for (const auto& m : machines_) {
    WriteVector(out, "w", m.w);
    out << "platt " << FormatExact(m.platt.a) << ' ' << FormatExact(m.platt.b)
        << '\n';
  }
}

std::unique_ptr<LinearSvm> LinearSvm::LoadBody(std::istream& in,
                                               std::vector<std::string> classes,
                                               std::size_t feature_dim) {
  SvmConfig config;
  {
    const auto cells = SplitString(ReadField(in, "svm_config"), ' ');
    if (cells.size() != 4) throw ParseError("malformed SVM config");
    config.lambda = ParseExact(cells[0]);
    config.epochs = std::stoi(cells[1]);
    config.calibration_folds = std::stoi(cells[2]);
    config.seed = std::stoull(cells[3]);
  }
  Standardizer standardizer = Standardizer::Load(in);
  const std::size_t n = std::stoul(ReadField(in, "machines"));
  std::vector<BinarySvm> machines(n);
  for (auto& m : machines) {
    m.w = ReadVector(in, "w");
    const auto cells = SplitString(ReadField(in, "platt"), ' ');
    if (cells.size() != 2) throw ParseError("malformed Platt parameters");
    m.platt = {ParseExact(cells[0]), ParseExact(cells[1])};
  }
  return std::make_unique<LinearSvm>(std::move(classes), feature_dim, config,
                                     std::move(standardizer), std::move(machines));
}

std::unique_ptr<LinearSvm> TrainLinearSvm(const Matrix& x,
                                          const std::vector<std::string>& y,
                                          const SvmConfig& config,
                                          std::vector<std::string> classes) {
  CheckTrainingInput(x, y);
  const std::vector<std::size_t> labels = EncodeLabels(y, classes);
  {
    std::vector<bool> seen(classes.size(), false);
    std::size_t distinct = 0;
    for (std::size_t l : labels) distinct += !seen[l], seen[l] = true;
    if (distinct < 2) throw ValidationError("SVM needs at least 2 classes");
  }
  Standardizer standardizer = Standardizer::Fit(x);
  const Matrix xa = AugmentBias(standardizer.Apply(x));
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t machines = classes.size() == 2 ? 1 : classes.size();
  const std::size_t positive_offset = classes.size() == 2 ? 1 : 0;
  const auto folds = static_cast<std::size_t>(std::max(config.calibration_folds, 0));

  // Fold assignment shared by all machines.
  std::vector<std::size_t> fold_of(n, 0);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(config.seed, kFoldStream));
    rng.Shuffle(order);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = folds ? i % folds : 0;
  }

  std::vector<Vector> targets(machines, Vector(static_cast<Eigen::Index>(n)));
  for (std::size_t m = 0; m < machines; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      targets[m](i) = labels[i] == m + positive_offset ? 1.0 : -1.0;
    }
  }
  auto usable_fold = [&](std::size_t m, std::size_t f) {
    bool pos = false, neg = false, held = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == f) {
        held = true;
        continue;
      }
      (targets[m](i) > 0 ? pos : neg) = true;
    }
    return pos && neg && held;
  };
  bool out_of_fold = folds >= 2 && n >= 2 * folds;
  for (std::size_t m = 0; m < machines && out_of_fold; ++m) {
    for (std::size_t f = 0; f < folds && out_of_fold; ++f) {
      out_of_fold = usable_fold(m, f);
    }
  }

  // Task (m, 0) is the final machine; (m, f + 1) holds out fold f.
  const std::size_t per_machine = 1 + (out_of_fold ? folds : 0);
  std::vector<BinarySvm> fitted(machines * per_machine);
  std::vector<std::vector<double>> fold_scores(machines * per_machine);
  ParallelFor(fitted.size(), config.jobs, [&](std::size_t task) {
    const std::size_t m = task / per_machine;
    const std::size_t part = task % per_machine;
    if (part == 0) {
      fitted[task] = TrainBinarySvm(xa, targets[m], config, m * (folds + 1));
      return;
    }
    const std::size_t f = part - 1;
    std::vector<Eigen::Index> train_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) train_rows.push_back(static_cast<Eigen::Index>(i));
    }
    Matrix xt(static_cast<Eigen::Index>(train_rows.size()), xa.cols());
    Vector yt(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      xt.row(r) = xa.row(train_rows[r]);
      yt(r) = targets[m](train_rows[r]);
    }
    fitted[task] = TrainBinarySvm(xt, yt, config, m * (folds + 1) + part);
    auto& scores = fold_scores[task];
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == f) scores.push_back(xa.row(i).dot(fitted[task].w));
    }
  });

  std::vector<BinarySvm> result(machines);
  for (std::size_t m = 0; m < machines; ++m) {
    result[m] = std::move(fitted[m * per_machine]);
    std::vector<double> scores(n);
    if (out_of_fold) {
      std::vector<std::size_t> cursor(folds, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t f = fold_of[i];
        scores[i] = fold_scores[m * per_machine + f + 1][cursor[f]++];
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) scores[i] = xa.row(i).dot(result[m].w);
    }
    std::vector<bool> positive(n);
    for (std::size_t i = 0; i < n; ++i) positive[i] = targets[m](i) > 0;
    result[m].platt = FitPlatt(scores, positive);
  }
  return std::make_unique<LinearSvm>(std::move(classes),
                                     static_cast<std::size_t>(x.cols()), config,
                                     std::move(standardizer), std::move(result));
}

// ---------------------------------------------------------------------------
// Logistic regression

double SoftmaxObjective(const Matrix& w, const Matrix& x_aug,
                        const std::vector<std::size_t>& y, double l2,
                        Matrix* grad) {
  const double n = static_cast<double>(x_aug.rows());
  const Eigen::Index d = w.cols() - 1;
  Matrix z = x_aug * w.transpose();  // n x K
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    loss += lse - z(i, static_cast<Eigen::Index>(y[i]));
    z.row(i) = (z.row(i).array() - lse).exp().matrix();  // probabilities
    z(i, static_cast<Eigen::Index>(y[i])) -= 1.0;
  }
  loss /= n;
  loss += 0.5 * l2 * w.leftCols(d).squaredNorm();
  if (grad) {
    *grad = z.transpose() * x_aug / n;
    grad->leftCols(d) += l2 * w.leftCols(d);
  }
  return loss;
}

LogisticRegression::LogisticRegression(std::vector<std::string> classes,
                                       std::size_t feature_dim,
                                       LogisticConfig config,
                                       Standardizer standardizer, Matrix weights,
                                       std::vector<double> objective)
    : ProbabilisticClassifier(std::move(classes), feature_dim),
      config_(config),
      standardizer_(std::move(standardizer)),
      weights_(std::move(weights)),
      objective_(std::move(objective)) {
  if (static_cast<std::size_t>(weights_.rows()) != this->classes().size() ||
      static_cast<std::size_t>(weights_.cols()) != feature_dim + 1) {
    throw ValidationError("logistic weights have the wrong shape");
  }
}

Matrix LogisticRegression::ProbaImpl(const Matrix& x) const {
  Matrix z = AugmentBias(standardizer_.Apply(x)) * weights_.transpose();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - m).exp().matrix();
    z.row(i) /= z.row(i).sum();
  }
  return z;
}

void LogisticRegression::SaveBody(std::ostream& out) const {
  out << "logreg_config " << FormatExact(config_.l2) << ' '
      << config_.max_iterations << ' ' << FormatExact(config_.tolerance) << '\n';
  standardizer_.Save(out);
  out << "weights " << weights_.rows() << '\n';
  for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
    WriteVector(out, "w", weights_.row(r).transpose());
  }
}

std::unique_ptr<LogisticRegression> LogisticRegression::LoadBody(
    std::istream& in, std::vector<std::string> classes,
    std::size_t feature_dim) {
  LogisticConfig config;
  {
    const auto cells = SplitString(ReadField(in, "logreg_config"), ' ');
    if (cells.size() != 3) throw ParseError("malformed logistic config");
    config.l2 = ParseExact(cells[0]);
    config.max_iterations = std::stoi(cells[1]);
    config.tolerance = ParseExact(cells[2]);
  }
  Standardizer standardizer = Standardizer::Load(in);
  const std::size_t rows = std::stoul(ReadField(in, "weights"));
  Matrix w(static_cast<Eigen::Index>(rows),
           static_cast<Eigen::Index>(feature_dim + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector v = ReadVector(in, "w");
    if (v.size() != w.cols()) throw ParseError("logistic weight row length");
    w.row(r) = v.transpose();
  }
  return std::make_unique<LogisticRegression>(
      std::move(classes), feature_dim, config, std::move(standardizer),
      std::move(w), std::vector<double>{});
}

std::unique_ptr<LogisticRegression> TrainLogistic(
    const Matrix& x, const std::vector<std::string>& y,
    const LogisticConfig& config, std::vector<std::string> classes) {
  CheckTrainingInput(x, y);
  if (config.l2 < 0 || config.max_iterations < 0) {
    throw ValidationError("logistic needs l2 >= 0 and max_iterations >= 0");
  }
  const std::vector<std::size_t> labels = EncodeLabels(y, classes);
  if (classes.size() < 2) throw ValidationError("logistic needs 2 classes");
  Standardizer standardizer = Standardizer::Fit(x);
  const Matrix xa = AugmentBias(standardizer.Apply(x));
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(classes.size()), xa.cols());
  Matrix grad;
  double f = SoftmaxObjective(w, xa, labels, config.l2, &grad);
  std::vector<double> history = {f};
  double step = 1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const double g2 = grad.squaredNorm();
    if (g2 == 0) break;
    bool accepted = false;
    Matrix candidate;
    double fc = 0;
    while (step > 1e-12) {
      candidate = w - step * grad;
      fc = SoftmaxObjective(candidate, xa, labels, config.l2, nullptr);
      if (fc <= f - 1e-4 * step * g2 && fc < f) {
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) break;
    const double improvement = f - fc;
    w = std::move(candidate);
    f = SoftmaxObjective(w, xa, labels, config.l2, &grad);
    history.push_back(f);
    if (improvement < config.tolerance) break;
    step = std::min(step * 2, 1e3);
  }
  return std::make_unique<LogisticRegression>(
      std::move(classes), static_cast<std::size_t>(x.cols()), config,
      std::move(standardizer), std::move(w), std::move(history));
}

}  // namespace offlang
