// Copyright 2026 The Pairsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pairsense/vad/train.hpp"

#include <cmath>
#include <stdexcept>

#include "pairsense/rng.hpp"

namespace pairsense::vad {

namespace {

struct Standardizer {
  FeatureVector mean = FeatureVector::Zero();
  FeatureVector std = FeatureVector::Ones();
};

Standardizer fit_standardizer(const Eigen::MatrixXd& x) {
  Standardizer s;
  s.mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  FeatureVector var = centered.array().square().colwise().mean();
  s.std = var.array().sqrt().max(1e-12);
  return s;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& x) {
  return (x.rowwise() - s.mean.transpose()).array().rowwise() /
         s.std.transpose().array();
}

struct LinearFit {
  FeatureVector w = FeatureVector::Zero();
  double b = 0.0;
};

// Full-batch subgradient descent on lambda/2 |w|^2 + mean hinge(y, w.x + b).
LinearFit fit_hinge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                    int iterations) {
  const auto n = static_cast<double>(x.rows());
  LinearFit fit;
  for (int t = 1; t <= iterations; ++t) {
    Eigen::VectorXd margins = y.cwiseProduct(x * fit.w + Eigen::VectorXd::Constant(x.rows(), fit.b));
    Eigen::VectorXd active = (margins.array() < 1.0).cast<double>() * y.array();
    FeatureVector grad_w = lambda * fit.w - (x.transpose() * active) / n;
    double grad_b = -active.sum() / n;
    double eta = 1.0 / std::sqrt(static_cast<double>(t));
    fit.w -= eta * grad_w;
    fit.b -= eta * grad_b;
  }
  return fit;
}

double holdout_accuracy(const LinearFit& fit, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& y) {
  Eigen::VectorXd scores = x * fit.w + Eigen::VectorXd::Constant(x.rows(), fit.b);
  long correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double predicted = scores[i] > 0.0 ? 1.0 : -1.0;
    if (predicted == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

}  // namespace

VadModel train(const std::vector<LabeledFeature>& labeled, const TrainOptions& options,
               TrainReport* report) {
  const auto n = static_cast<Eigen::Index>(labeled.size());
  Eigen::MatrixXd x(n, kNumCepstra);
  Eigen::VectorXd y(n);
  std::vector<std::size_t> speech_idx, noise_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = labeled[static_cast<std::size_t>(i)].first.transpose();
    bool speech = labeled[static_cast<std::size_t>(i)].second == FrameLabel::Speech;
    y[i] = speech ? 1.0 : -1.0;
    (speech ? speech_idx : noise_idx).push_back(static_cast<std::size_t>(i));
  }
  if (speech_idx.empty() || noise_idx.empty()) {
    throw std::domain_error("train: both classes must be present");
  }
  if (static_cast<int>(speech_idx.size()) < options.folds ||
      static_cast<int>(noise_idx.size()) < options.folds) {
    throw std::domain_error("train: need at least one example per class per fold");
  }

  // Stratified fold assignment: shuffle within class, deal round-robin.
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  Rng rng(options.seed);
  for (auto* cls : {&speech_idx, &noise_idx}) {
    shuffle(*cls, rng);
    for (std::size_t pos = 0; pos < cls->size(); ++pos) {
      fold_of[(*cls)[pos]] = static_cast<int>(pos % static_cast<std::size_t>(options.folds));
    }
  }

  double best_lambda = options.lambda_grid.front();
  double best_accuracy = -1.0;
  if (report) report->grid.clear();
  for (double lambda : options.lambda_grid) {
    double accuracy_sum = 0.0;
    for (int fold = 0; fold < options.folds; ++fold) {
      Eigen::Index n_val = 0;
      for (Eigen::Index i = 0; i < n; ++i) n_val += fold_of[static_cast<std::size_t>(i)] == fold;
      Eigen::MatrixXd x_tr(n - n_val, kNumCepstra), x_val(n_val, kNumCepstra);
      Eigen::VectorXd y_tr(n - n_val), y_val(n_val);
      Eigen::Index ti = 0, vi = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (fold_of[static_cast<std::size_t>(i)] == fold) {
          x_val.row(vi) = x.row(i);
          y_val[vi++] = y[i];
        } else {
          x_tr.row(ti) = x.row(i);
          y_tr[ti++] = y[i];
        }
      }
      Standardizer s = fit_standardizer(x_tr);
      LinearFit fit = fit_hinge(apply_standardizer(s, x_tr), y_tr, lambda, options.iterations);
      accuracy_sum += holdout_accuracy(fit, apply_standardizer(s, x_val), y_val);
    }
    double mean_accuracy = accuracy_sum / options.folds;
    if (report) report->grid.push_back({lambda, mean_accuracy});
    if (mean_accuracy > best_accuracy) {
      best_accuracy = mean_accuracy;
      best_lambda = lambda;
    }
  }
  if (report) report->chosen_lambda = best_lambda;

  Standardizer s = fit_standardizer(x);
  LinearFit fit = fit_hinge(apply_standardizer(s, x), y, best_lambda, options.iterations);

  VadModel model;
  model.weights = fit.w;
  model.bias = fit.b;
  model.feat_mean = s.mean;
  model.feat_std = s.std;
  return model;
}

}  // namespace pairsense::vad
