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

#ifndef VISE_FUSION_CATEGORY_FUSION_HPP_
#define VISE_FUSION_CATEGORY_FUSION_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vise/embedding.hpp"

namespace vise::fusion {

// Labeled reference point for the search-based vote.
struct ReferencePair {
  Embedding x;
  int label = 0;  // in [0, kNumCategories)
};

// One retrieved neighbor: its label and its distance to the query.
struct NeighborHit {
  int label = 0;
  double distance = 0.0;
};

struct WeightParams {
  double lambda = 1.0;   // Gaussian kernel bandwidth, > 0
  int k_neighbors = 30;  // neighbors consulted per query
};

// Normalized score vector over the fixed category set.
struct CategoryDistribution {
  std::array<double, kNumCategories> probs{};

  // Argmax with ties broken toward the smaller category index.
  int argmax() const {
    int best = 0;
    for (int c = 1; c < kNumCategories; ++c) {
      if (probs[c] > probs[best]) best = c;
    }
    return best;
  }

  void validate() const;

  static CategoryDistribution normalized(std::span<const double> raw);
  static CategoryDistribution uniform();
  static CategoryDistribution point_mass(int category);
};

// exp(-lambda * ||x - xi||^2). In (0, 1].
double knn_weight(const Embedding& x, const Embedding& xi, double lambda);

// Same kernel evaluated from a precomputed distance.
double knn_weight_from_distance(double distance, double lambda);

// Weighted vote over retrieved neighbors:
//   probs[c] = sum_{i: label_i = c} w_i / sum_i w_i.
CategoryDistribution search_based_scores(std::span<const NeighborHit> neighbors,
                                         const WeightParams& params);

// Brute-force top-k lookup against a reference set, ties by insertion order
// of equal distances resolved by lower index. Used by lambda fitting and by
// tests; the online pipeline retrieves neighbors through the index engine.
std::vector<NeighborHit> nearest_reference_neighbors(
    const Embedding& x, std::span<const ReferencePair> reference, int k);

struct LambdaSearchConfig {
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  int bracket_points = 20;  // coarse log-grid used to bracket the optimum
  double smoothing = 1e-9;  // added to each class probability before log
};

struct ValidationPoint {
  Embedding x;
  int label = 0;
};

// Log-likelihood of the true labels under the weighted-vote model at a
// given lambda. Exposed so tests can run dense-grid oracles on it.
double label_log_likelihood(std::span<const ValidationPoint> validation,
                            std::span<const ReferencePair> reference, int k,
                            double lambda, const LambdaSearchConfig& cfg = {});

// Maximum-likelihood bandwidth: coarse log-grid bracket, then golden-section
// refinement. A flat likelihood returns lambda_min; an optimum on the grid
// edge returns that edge.
double estimate_lambda(std::span<const ValidationPoint> validation,
                       std::span<const ReferencePair> reference, int k,
                       const LambdaSearchConfig& cfg = {});

// alpha * model + (1 - alpha) * search, renormalized.
CategoryDistribution fuse(const CategoryDistribution& model,
                          const CategoryDistribution& search, double alpha);

struct AlphaTuneResult {
  double alpha = 0.0;
  double accuracy = 0.0;        // Accuracy@1 at the chosen alpha
  double model_accuracy = 0.0;  // alpha = 1 endpoint
  double search_accuracy = 0.0;  // alpha = 0 endpoint
};

// Grid search over alpha in {0, 0.05, ..., 1} maximizing Accuracy@1 of the
// fused argmax; ties resolved toward the smaller alpha.
AlphaTuneResult tune_alpha(std::span<const CategoryDistribution> model,
                           std::span<const CategoryDistribution> search,
                           std::span<const int> labels);

}  // namespace vise::fusion

#endif  // VISE_FUSION_CATEGORY_FUSION_HPP_
