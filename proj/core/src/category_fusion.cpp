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

#include "vise/fusion/category_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vise/distance.hpp"
#include "vise/errors.hpp"

namespace vise::fusion {

void CategoryDistribution::validate() const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidValueError("category probability out of [0,1]");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw InvalidValueError("category distribution does not sum to 1");
  }
}

CategoryDistribution CategoryDistribution::normalized(
    std::span<const double> raw) {
  if (raw.size() != kNumCategories) {
    throw DimensionError("category score vector must have " +
                         std::to_string(kNumCategories) + " entries");
  }
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidValueError("category score must be finite and >= 0");
    }
    sum += v;
  }
  if (sum <= 0.0) throw InvalidValueError("category scores all zero");
  CategoryDistribution d;
  for (int c = 0; c < kNumCategories; ++c) d.probs[c] = raw[c] / sum;
  return d;
}

CategoryDistribution CategoryDistribution::uniform() {
  CategoryDistribution d;
  d.probs.fill(1.0 / kNumCategories);
  return d;
}

CategoryDistribution CategoryDistribution::point_mass(int category) {
  if (category < 0 || category >= kNumCategories) {
    throw InvalidValueError("category index out of range");
  }
  CategoryDistribution d;
  d.probs[category] = 1.0;
  return d;
}

double knn_weight_from_distance(double distance, double lambda) {
  if (lambda <= 0.0) throw InvalidParamError("knn_weight: lambda must be > 0");
  return std::exp(-lambda * distance * distance);
}

double knn_weight(const Embedding& x, const Embedding& xi, double lambda) {
  return knn_weight_from_distance(l2_distance(x, xi), lambda);
}

CategoryDistribution search_based_scores(std::span<const NeighborHit> neighbors,
                                         const WeightParams& params) {
  if (neighbors.empty()) {
    throw EmptyInputError("search_based_scores: no neighbors");
  }
  if (params.k_neighbors < 1) {
    throw InvalidParamError("search_based_scores: k_neighbors must be >= 1");
  }
  if (neighbors.size() > static_cast<size_t>(params.k_neighbors)) {
    throw InvalidParamError("search_based_scores: more neighbors than k");
  }
  std::array<double, kNumCategories> acc{};
  for (const NeighborHit& n : neighbors) {
    if (n.label < 0 || n.label >= kNumCategories) {
      throw InvalidValueError("neighbor label out of range");
    }
    acc[n.label] += knn_weight_from_distance(n.distance, params.lambda);
  }
  return CategoryDistribution::normalized(acc);
}

std::vector<NeighborHit> nearest_reference_neighbors(
    const Embedding& x, std::span<const ReferencePair> reference, int k) {
  if (reference.empty()) {
    throw EmptyInputError("nearest_reference_neighbors: empty reference set");
  }
  if (k < 1) throw InvalidParamError("k must be >= 1");
  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(reference.size());
  for (size_t i = 0; i < reference.size(); ++i) {
    scored.emplace_back(l2_distance(x, reference[i].x), i);
  }
  const size_t kept = std::min<size_t>(static_cast<size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + kept, scored.end());
  std::vector<NeighborHit> hits(kept);
  for (size_t i = 0; i < kept; ++i) {
    hits[i] = {reference[scored[i].second].label, scored[i].first};
  }
  return hits;
}

namespace {

// Neighbor lists are fixed per validation point; only the kernel re-weights
// them, so they are computed once per fit.
std::vector<std::vector<NeighborHit>> neighbor_lists(
    std::span<const ValidationPoint> validation,
    std::span<const ReferencePair> reference, int k) {
  std::vector<std::vector<NeighborHit>> lists;
  lists.reserve(validation.size());
  for (const ValidationPoint& v : validation) {
    lists.push_back(nearest_reference_neighbors(v.x, reference, k));
  }
  return lists;
}

double log_likelihood_from_lists(
    std::span<const ValidationPoint> validation,
    const std::vector<std::vector<NeighborHit>>& lists, double lambda,
    double smoothing) {
  double ll = 0.0;
  for (size_t i = 0; i < validation.size(); ++i) {
    double total = 0.0;
    double label_mass = 0.0;
    for (const NeighborHit& n : lists[i]) {
      const double w = knn_weight_from_distance(n.distance, lambda);
      total += w;
      if (n.label == validation[i].label) label_mass += w;
    }
    ll += std::log(label_mass / total + smoothing);
  }
  return ll;
}

}  // namespace

double label_log_likelihood(std::span<const ValidationPoint> validation,
                            std::span<const ReferencePair> reference, int k,
                            double lambda, const LambdaSearchConfig& cfg) {
  if (validation.empty()) throw EmptyInputError("empty validation set");
  const auto lists = neighbor_lists(validation, reference, k);
  return log_likelihood_from_lists(validation, lists, lambda, cfg.smoothing);
}

double estimate_lambda(std::span<const ValidationPoint> validation,
                       std::span<const ReferencePair> reference, int k,
                       const LambdaSearchConfig& cfg) {
  if (validation.empty()) throw EmptyInputError("empty validation set");
  if (cfg.lambda_min <= 0.0 || cfg.lambda_max <= cfg.lambda_min ||
      cfg.bracket_points < 3) {
    throw InvalidParamError("estimate_lambda: bad search configuration");
  }
  const auto lists = neighbor_lists(validation, reference, k);

  // A point whose neighborhood never contains its true label has zero label
  // probability at every lambda; the likelihood cannot rank lambdas for it.
  std::string offenders;
  int offender_count = 0;
  for (size_t i = 0; i < validation.size(); ++i) {
    const bool covered =
        std::any_of(lists[i].begin(), lists[i].end(), [&](const NeighborHit& n) {
          return n.label == validation[i].label;
        });
    if (!covered) {
      ++offender_count;
      if (offender_count <= 10) {
        offenders += (offenders.empty() ? "" : ", ") + std::to_string(i);
      }
    }
  }
  if (offender_count > 0) {
    throw DegenerateLikelihoodError(
        "true label unreachable for " + std::to_string(offender_count) +
        " validation point(s) at indices: " + offenders);
  }

  const double log_min = std::log(cfg.lambda_min);
  const double log_max = std::log(cfg.lambda_max);
  std::vector<double> grid_ll(cfg.bracket_points);
  int best = 0;
  for (int i = 0; i < cfg.bracket_points; ++i) {
    const double lam = std::exp(
        log_min + (log_max - log_min) * i / (cfg.bracket_points - 1));
    grid_ll[i] =
        log_likelihood_from_lists(validation, lists, lam, cfg.smoothing);
    // Ties (saturated plateaus) resolve toward larger lambda so a likelihood
    // that is increasing-then-flat reports the upper search bound.
    if (grid_ll[i] >= grid_ll[best]) best = i;
  }

  const double range =
      *std::max_element(grid_ll.begin(), grid_ll.end()) -
      *std::min_element(grid_ll.begin(), grid_ll.end());
  if (range < 1e-12) return cfg.lambda_min;  // flat likelihood
  if (best == 0) return cfg.lambda_min;
  if (best == cfg.bracket_points - 1) return cfg.lambda_max;

  // Golden-section on log-lambda inside the bracketing grid cell pair.
  const double step = (log_max - log_min) / (cfg.bracket_points - 1);
  double lo = log_min + step * (best - 1);
  double hi = log_min + step * (best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = log_likelihood_from_lists(validation, lists, std::exp(x1),
                                        cfg.smoothing);
  double f2 = log_likelihood_from_lists(validation, lists, std::exp(x2),
                                        cfg.smoothing);
  for (int iter = 0; iter < 80 && (hi - lo) > 1e-10; ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = log_likelihood_from_lists(validation, lists, std::exp(x2),
                                     cfg.smoothing);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = log_likelihood_from_lists(validation, lists, std::exp(x1),
                                     cfg.smoothing);
    }
  }
  return std::exp((lo + hi) / 2.0);
}

CategoryDistribution fuse(const CategoryDistribution& model,
                          const CategoryDistribution& search, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw InvalidParamError("fuse: alpha must lie in [0,1]");
  }
  model.validate();
  search.validate();
  std::array<double, kNumCategories> mixed{};
  for (int c = 0; c < kNumCategories; ++c) {
    mixed[c] = alpha * model.probs[c] + (1.0 - alpha) * search.probs[c];
  }
  return CategoryDistribution::normalized(mixed);
}

AlphaTuneResult tune_alpha(std::span<const CategoryDistribution> model,
                           std::span<const CategoryDistribution> search,
                           std::span<const int> labels) {
  if (labels.empty()) throw EmptyInputError("tune_alpha: empty validation set");
  if (model.size() != labels.size() || search.size() != labels.size()) {
    throw DimensionError("tune_alpha: input lengths differ");
  }
  auto accuracy_at = [&](double alpha) {
    size_t hits = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (fuse(model[i], search[i], alpha).argmax() == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
  };

  AlphaTuneResult result;
  result.search_accuracy = accuracy_at(0.0);
  result.model_accuracy = accuracy_at(1.0);
  result.alpha = 0.0;
  result.accuracy = result.search_accuracy;
  for (int i = 1; i <= 20; ++i) {
    const double alpha = 0.05 * i;
    const double acc = accuracy_at(alpha);
    if (acc > result.accuracy) {
      result.accuracy = acc;
      result.alpha = alpha;
    }
  }
  return result;
}

}  // namespace vise::fusion
