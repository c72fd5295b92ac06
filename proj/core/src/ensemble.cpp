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

#include "vise/rerank/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vise/io/binary.hpp"

namespace vise::rerank {

namespace {

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

int node_depth(const std::vector<TreeNode>& nodes, int at) {
  const TreeNode& node = nodes[at];
  if (node.feature < 0) return 0;
  return 1 + std::max(node_depth(nodes, node.left),
                      node_depth(nodes, node.right));
}

}  // namespace

int RegressionTree::depth() const {
  return nodes.empty() ? 0 : node_depth(nodes, 0);
}

void TreeEnsemble::validate() const {
  const int n_features = static_cast<int>(feature_names.size());
  for (const RegressionTree& tree : trees) {
    if (tree.nodes.empty()) throw InvalidValueError("ensemble: empty tree");
    for (const TreeNode& node : tree.nodes) {
      if (node.feature >= n_features) {
        throw InvalidValueError("ensemble: node references unknown feature");
      }
      if (node.feature >= 0) {
        const int n = static_cast<int>(tree.nodes.size());
        if (node.left < 0 || node.left >= n || node.right < 0 ||
            node.right >= n) {
          throw InvalidValueError("ensemble: node child out of range");
        }
      }
    }
    if (tree.depth() > max_depth) {
      throw InvalidValueError("ensemble: tree exceeds max depth");
    }
  }
}

QualityScore score_ordered(const TreeEnsemble& ensemble,
                           std::span<const double> features) {
  if (features.size() != ensemble.feature_names.size()) {
    throw MissingFeatureError("score: feature vector length mismatch");
  }
  QualityScore s;
  for (const RegressionTree& tree : ensemble.trees) {
    s.raw += ensemble.shrinkage * tree.eval(features);
  }
  s.scaled = logistic(ensemble.logistic_a * s.raw + ensemble.logistic_b);
  return s;
}

QualityScore score(const TreeEnsemble& ensemble,
                   const std::map<std::string, double>& features) {
  std::vector<double> ordered(ensemble.feature_names.size());
  for (size_t i = 0; i < ensemble.feature_names.size(); ++i) {
    const auto it = features.find(ensemble.feature_names[i]);
    if (it == features.end()) {
      throw MissingFeatureError("score: missing feature '" +
                                ensemble.feature_names[i] + "'");
    }
    ordered[i] = it->second;
  }
  return score_ordered(ensemble, ordered);
}

std::string ensemble_to_json(const TreeEnsemble& ensemble) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["feature_names"] = ensemble.feature_names;
  doc["shrinkage"] = ensemble.shrinkage;
  doc["max_depth"] = ensemble.max_depth;
  doc["logistic"] = {{"a", ensemble.logistic_a}, {"b", ensemble.logistic_b}};
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const RegressionTree& tree : ensemble.trees) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const TreeNode& node : tree.nodes) {
      nodes.push_back({{"feature", node.feature},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right},
                       {"value", node.value}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

TreeEnsemble ensemble_from_json(const std::string& json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  if (doc.at("version").get<int>() != 1) {
    throw InvalidValueError("ensemble: unsupported version");
  }
  TreeEnsemble e;
  e.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  e.shrinkage = doc.at("shrinkage").get<double>();
  e.max_depth = doc.at("max_depth").get<int>();
  e.logistic_a = doc.at("logistic").at("a").get<double>();
  e.logistic_b = doc.at("logistic").at("b").get<double>();
  for (const auto& tree_doc : doc.at("trees")) {
    RegressionTree tree;
    for (const auto& node_doc : tree_doc.at("nodes")) {
      TreeNode node;
      node.feature = node_doc.at("feature").get<int>();
      node.threshold = node_doc.at("threshold").get<double>();
      node.left = node_doc.at("left").get<int>();
      node.right = node_doc.at("right").get<int>();
      node.value = node_doc.at("value").get<double>();
      tree.nodes.push_back(node);
    }
    e.trees.push_back(std::move(tree));
  }
  e.validate();
  return e;
}

void save_ensemble(const TreeEnsemble& ensemble, const std::string& path) {
  const std::string text = ensemble_to_json(ensemble);
  io::write_file(path, std::vector<uint8_t>(text.begin(), text.end()));
}

TreeEnsemble load_ensemble(const std::string& path) {
  const auto bytes = io::read_file(path);
  return ensemble_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace vise::rerank
