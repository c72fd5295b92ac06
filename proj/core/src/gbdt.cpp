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

#include "vise/rerank/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vise/rng.hpp"

namespace vise::rerank {

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

struct TreeBuilder {
  std::span<const TrainExample> examples;
  std::span<const double> targets;
  int max_depth;
  int min_leaf;
  RegressionTree tree;

  int build(std::vector<uint32_t>& rows, int depth) {
    const double mean = region_mean(rows);
    if (depth >= max_depth ||
        rows.size() < static_cast<size_t>(2 * min_leaf)) {
      return emit_leaf(mean);
    }
    const SplitChoice split = best_split(rows, mean);
    if (!split.found) return emit_leaf(mean);

    std::vector<uint32_t> left_rows, right_rows;
    for (uint32_t r : rows) {
      if (examples[r].features[split.feature] > split.threshold) {
        right_rows.push_back(r);
      } else {
        left_rows.push_back(r);
      }
    }
    const int node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{split.feature, split.threshold, -1, -1, 0.0});
    const int left = build(left_rows, depth + 1);
    const int right = build(right_rows, depth + 1);
    tree.nodes[node].left = left;
    tree.nodes[node].right = right;
    return node;
  }

  int emit_leaf(double value) {
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, value});
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  double region_mean(const std::vector<uint32_t>& rows) const {
    double sum = 0.0;
    for (uint32_t r : rows) sum += targets[r];
    return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
  }

  // Exhaustive scan over features and midpoints; ties go to the lower
  // feature index, then the smaller threshold (first seen wins on >).
  SplitChoice best_split(const std::vector<uint32_t>& rows,
                         double parent_mean) const {
    const size_t n = rows.size();
    double parent_sse = 0.0;
    for (uint32_t r : rows) {
      const double d = targets[r] - parent_mean;
      parent_sse += d * d;
    }

    SplitChoice best;
    best.sse = parent_sse - 1e-12;
    const int n_features = static_cast<int>(examples[rows[0]].features.size());
    std::vector<std::pair<double, double>> ordered(n);  // (feature, target)
    for (int f = 0; f < n_features; ++f) {
      for (size_t i = 0; i < n; ++i) {
        ordered[i] = {examples[rows[i]].features[f], targets[rows[i]]};
      }
      std::sort(ordered.begin(), ordered.end());
      // Prefix sums let each candidate threshold evaluate in O(1).
      double left_sum = 0.0, left_sq = 0.0;
      double total_sum = 0.0, total_sq = 0.0;
      for (const auto& [x, y] : ordered) {
        total_sum += y;
        total_sq += y * y;
      }
      for (size_t i = 0; i + 1 < n; ++i) {
        left_sum += ordered[i].second;
        left_sq += ordered[i].second * ordered[i].second;
        if (ordered[i].first == ordered[i + 1].first) continue;
        const size_t left_n = i + 1;
        const size_t right_n = n - left_n;
        if (left_n < static_cast<size_t>(min_leaf) ||
            right_n < static_cast<size_t>(min_leaf)) {
          continue;
        }
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse =
            (left_sq - left_sum * left_sum / static_cast<double>(left_n)) +
            (right_sq - right_sum * right_sum / static_cast<double>(right_n));
        if (sse < best.sse) {
          best.found = true;
          best.feature = f;
          best.threshold = (ordered[i].first + ordered[i + 1].first) / 2.0;
          best.sse = sse;
        }
      }
    }
    return best;
  }
};

RegressionTree fit_tree(std::span<const TrainExample> examples,
                        std::span<const double> targets,
                        const std::vector<uint32_t>& rows, int max_depth,
                        int min_leaf) {
  TreeBuilder builder{examples, targets, max_depth, min_leaf, {}};
  std::vector<uint32_t> all = rows;
  builder.build(all, 0);
  return std::move(builder.tree);
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// 1-D logistic regression scaled = sigmoid(a raw + b), Newton iterations
// with a small ridge so separable data cannot blow up.
void calibrate_logistic(std::span<const double> raw, std::span<const int> labels,
                        double& a, double& b) {
  a = 1.0;
  b = 0.0;
  constexpr double kRidge = 1e-6;
  for (int iter = 0; iter < 100; ++iter) {
    double g_a = kRidge * a, g_b = kRidge * b;
    double h_aa = kRidge, h_ab = 0.0, h_bb = kRidge;
    for (size_t i = 0; i < raw.size(); ++i) {
      const double p = logistic(a * raw[i] + b);
      const double err = p - static_cast<double>(labels[i]);
      const double w = std::max(p * (1.0 - p), 1e-12);
      g_a += err * raw[i];
      g_b += err;
      h_aa += w * raw[i] * raw[i];
      h_ab += w * raw[i];
      h_bb += w;
    }
    const double det = h_aa * h_bb - h_ab * h_ab;
    if (std::fabs(det) < 1e-18) break;
    const double da = (h_bb * g_a - h_ab * g_b) / det;
    const double db = (h_aa * g_b - h_ab * g_a) / det;
    a -= da;
    b -= db;
    if (std::fabs(da) < 1e-10 && std::fabs(db) < 1e-10) break;
  }
}

}  // namespace

double auc_score(std::span<const double> scores, std::span<const int> labels) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return scores[i] < scores[j]; });

  size_t positives = 0, negatives = 0;
  for (int y : labels) (y ? positives : negatives)++;
  if (positives == 0 || negatives == 0) return 0.5;

  // Average ranks over tied scores, then Mann-Whitney U.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() &&
           scores[order[j + 1]] == scores[order[i]]) {
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j + 1)) /
                            2.0;
    for (size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - static_cast<double>(positives) *
                                      (static_cast<double>(positives) + 1.0) /
                                      2.0;
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

TreeEnsemble fit(std::span<const TrainExample> training,
                 std::span<const std::string> feature_names,
                 const FitConfig& config, FitReport* report) {
  if (training.size() < 2) {
    throw EmptyInputError("fit: need at least two examples");
  }
  bool has_pos = false, has_neg = false;
  for (const TrainExample& ex : training) {
    if (ex.features.size() != feature_names.size()) {
      throw DimensionError("fit: feature vector length mismatch");
    }
    (ex.label ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DegenerateLabelsError("fit: training labels are single-class");
  }

  // Deterministic shuffle, then tail split for calibration/holdout.
  std::vector<uint32_t> order(training.size());
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(config.seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.next_below(i)]);
  }
  size_t holdout_n =
      static_cast<size_t>(config.holdout_fraction * training.size());
  holdout_n = std::min(holdout_n, training.size() - 2);
  const size_t train_n = training.size() - holdout_n;
  std::vector<uint32_t> train_rows(order.begin(), order.begin() + train_n);
  std::vector<uint32_t> hold_rows(order.begin() + train_n, order.end());

  TreeEnsemble ensemble;
  ensemble.feature_names.assign(feature_names.begin(), feature_names.end());
  ensemble.shrinkage = config.shrinkage;
  ensemble.max_depth = config.max_depth;

  std::vector<double> predictions(training.size(), 0.0);
  std::vector<double> residuals(training.size(), 0.0);
  if (report) report->train_loss.clear();
  for (int round = 0; round < config.rounds; ++round) {
    double loss = 0.0;
    for (uint32_t r : train_rows) {
      residuals[r] = static_cast<double>(training[r].label) - predictions[r];
      loss += residuals[r] * residuals[r];
    }
    if (report) {
      report->train_loss.push_back(loss / static_cast<double>(train_n));
    }
    RegressionTree tree = fit_tree(training, residuals, train_rows,
                                   config.max_depth, config.min_leaf);
    for (size_t i = 0; i < training.size(); ++i) {
      predictions[i] +=
          config.shrinkage * tree.eval(training[i].features);
    }
    ensemble.trees.push_back(std::move(tree));
  }

  // Calibrate on the holdout; fall back to the training split when the
  // holdout is missing or single-class.
  auto rows_ok = [&](const std::vector<uint32_t>& rows) {
    bool pos = false, neg = false;
    for (uint32_t r : rows) (training[r].label ? pos : neg) = true;
    return pos && neg;
  };
  const std::vector<uint32_t>& calib_rows =
      (!hold_rows.empty() && rows_ok(hold_rows)) ? hold_rows : train_rows;
  std::vector<double> raw(calib_rows.size());
  std::vector<int> labels(calib_rows.size());
  for (size_t i = 0; i < calib_rows.size(); ++i) {
    raw[i] = predictions[calib_rows[i]];
    labels[i] = training[calib_rows[i]].label;
  }
  calibrate_logistic(raw, labels, ensemble.logistic_a, ensemble.logistic_b);

  if (report) {
    report->train_size = train_n;
    report->holdout_size = hold_rows.size();
    std::vector<double> hold_raw;
    std::vector<int> hold_labels;
    size_t correct = 0;
    for (uint32_t r : hold_rows) {
      const double scaled = logistic(ensemble.logistic_a * predictions[r] +
                                     ensemble.logistic_b);
      hold_raw.push_back(predictions[r]);
      hold_labels.push_back(training[r].label);
      if ((scaled >= 0.5) == (training[r].label == 1)) ++correct;
    }
    report->holdout_accuracy =
        hold_rows.empty()
            ? 0.0
            : static_cast<double>(correct) / static_cast<double>(hold_rows.size());
    report->holdout_auc = auc_score(hold_raw, hold_labels);
  }
  return ensemble;
}

}  // namespace vise::rerank
