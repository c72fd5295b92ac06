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

#ifndef VISE_RERANK_ENSEMBLE_HPP_
#define VISE_RERANK_ENSEMBLE_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vise/errors.hpp"

namespace vise::rerank {

// Axis-aligned split node; feature == -1 marks a leaf carrying `value`.
// Internal nodes send value > threshold to `right`, else `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  double eval(std::span<const double> features) const {
    int at = 0;
    for (;;) {
      const TreeNode& node = nodes[at];
      if (node.feature < 0) return node.value;
      at = features[node.feature] > node.threshold ? node.right : node.left;
    }
  }

  int depth() const;
};

struct QualityScore {
  double raw = 0.0;
  double scaled = 0.0;  // logistic(a * raw + b), in [0, 1]
};

// Boosted regression trees over a declared feature schema, with a 1-D
// logistic output calibration: raw = sum shrinkage * tree(x),
// scaled = sigmoid(a * raw + b).
struct TreeEnsemble {
  std::vector<std::string> feature_names;
  std::vector<RegressionTree> trees;
  double shrinkage = 0.1;
  double logistic_a = 1.0;
  double logistic_b = 0.0;
  int max_depth = 4;

  void validate() const;
};

// Fast path: features ordered per ensemble schema.
QualityScore score_ordered(const TreeEnsemble& ensemble,
                           std::span<const double> features);

// Named path: every declared feature must be present.
QualityScore score(const TreeEnsemble& ensemble,
                   const std::map<std::string, double>& features);

// Versioned JSON serialization; dump -> parse -> dump is byte-stable.
std::string ensemble_to_json(const TreeEnsemble& ensemble);
TreeEnsemble ensemble_from_json(const std::string& json_text);
void save_ensemble(const TreeEnsemble& ensemble, const std::string& path);
TreeEnsemble load_ensemble(const std::string& path);

}  // namespace vise::rerank

#endif  // VISE_RERANK_ENSEMBLE_HPP_
