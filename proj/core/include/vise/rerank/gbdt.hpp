// Copyright 2026 The Vise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VISE_RERANK_GBDT_HPP_
#define VISE_RERANK_GBDT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vise/rerank/ensemble.hpp"

namespace vise::rerank {

struct TrainExample {
  std::vector<double> features;  // ordered per feature schema
  int label = 0;                 // 0 or 1
};

struct FitConfig {
  int rounds = 50;
  int max_depth = 4;
  double shrinkage = 0.1;
  double holdout_fraction = 0.2;  // calibration + report split
  int min_leaf = 1;
  uint64_t seed = 1;
};

struct FitReport {
  double holdout_accuracy = 0.0;
  double holdout_auc = 0.5;
  size_t train_size = 0;
  size_t holdout_size = 0;
  std::vector<double> train_loss;  // mean squared residual per round
};

// Squared-loss gradient boosting (residual fitting) plus logistic
// calibration of raw scores on the held-out split. Deterministic for a
// fixed seed. Single-class input raises DegenerateLabelsError.
TreeEnsemble fit(std::span<const TrainExample> training,
                 std::span<const std::string> feature_names,
                 const FitConfig& config, FitReport* report = nullptr);

// Rank-based AUC (Mann-Whitney, ties averaged). 0.5 when degenerate.
double auc_score(std::span<const double> scores, std::span<const int> labels);

}  // namespace vise::rerank

#endif  // VISE_RERANK_GBDT_HPP_
