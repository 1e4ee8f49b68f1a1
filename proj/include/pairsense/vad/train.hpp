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

#pragma once

#include <cstdint>
#include <vector>

#include "pairsense/vad/model.hpp"

namespace pairsense::vad {

struct TrainOptions {
  std::vector<double> lambda_grid = {0.01, 0.1, 1.0, 10.0};  // L2 strength
  int folds = 10;
  int iterations = 300;
  std::uint64_t seed = 0;
};

struct CvResult {
  double lambda = 0.0;
  double cv_accuracy = 0.0;
};

struct TrainReport {
  std::vector<CvResult> grid;  // one entry per lambda, grid order
  double chosen_lambda = 0.0;
};

// L2-regularized hinge loss, full-batch subgradient descent. Full-batch makes
// the objective (and hence the trajectory) invariant under duplicating the
// training set, and the only seed-dependent step is the stratified fold
// assignment. Ties in CV accuracy resolve to the smallest lambda.
VadModel train(const std::vector<LabeledFeature>& labeled,
               const TrainOptions& options = TrainOptions{},
               TrainReport* report = nullptr);

}  // namespace pairsense::vad
