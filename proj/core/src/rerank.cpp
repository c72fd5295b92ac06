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

#include "vise/rerank/rerank.hpp"

#include <algorithm>

namespace vise::rerank {

std::map<std::string, double> quality_features(const QualityMeta& quality) {
  return {
      {"sales_volume", static_cast<double>(quality.sales_volume)},
      {"percent_conversion", static_cast<double>(quality.percent_conversion)},
      {"applause_rate", static_cast<double>(quality.applause_rate)},
  };
}

RankedList rerank_top(const RankedList& candidates,
                      const std::function<QualityMeta(uint64_t)>& quality_of,
                      const TreeEnsemble& ensemble, const RerankConfig& config) {
  config.validate();
  RankedList out = candidates;
  out.truncate(config.top_n);
  for (RankedEntry& entry : out.entries) {
    const QualityScore q = score(ensemble, quality_features(quality_of(entry.id)));
    const double similarity =
        1.0 - std::clamp(entry.distance / 2.0, 0.0, 1.0);
    entry.score = config.beta * similarity + (1.0 - config.beta) * q.scaled;
  }
  out.sort_by_score_desc();
  return out;
}

}  // namespace vise::rerank
