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

#ifndef VISE_RERANK_RERANK_HPP_
#define VISE_RERANK_RERANK_HPP_

#include <functional>

#include "vise/item.hpp"
#include "vise/ranked_list.hpp"
#include "vise/rerank/ensemble.hpp"

namespace vise::rerank {

struct RerankConfig {
  double beta = 0.7;  // similarity weight in the blended score
  size_t top_n = 60;

  void validate() const {
    if (beta < 0.0 || beta > 1.0) {
      throw InvalidParamError("rerank: beta must lie in [0,1]");
    }
  }
};

// Standard feature schema derived from item quality metadata.
inline const std::vector<std::string>& quality_feature_names() {
  static const std::vector<std::string> kNames = {
      "sales_volume", "percent_conversion", "applause_rate"};
  return kNames;
}

std::map<std::string, double> quality_features(const QualityMeta& quality);

// Re-orders the similarity top_n by
//   beta * (1 - distance/2) + (1 - beta) * scaled_quality,
// descending, ties ascending id. Unit-normalized embeddings bound L2
// distances by 2, which makes distance/2 the normalized dissimilarity.
// The output is a permutation of the truncated input: no id enters or
// leaves, and each entry carries its blended score.
RankedList rerank_top(const RankedList& candidates,
                      const std::function<QualityMeta(uint64_t)>& quality_of,
                      const TreeEnsemble& ensemble, const RerankConfig& config);

}  // namespace vise::rerank

#endif  // VISE_RERANK_RERANK_HPP_
