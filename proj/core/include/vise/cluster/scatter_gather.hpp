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

#ifndef VISE_CLUSTER_SCATTER_GATHER_HPP_
#define VISE_CLUSTER_SCATTER_GATHER_HPP_

#include <span>
#include <vector>

#include "vise/cluster/shard.hpp"
#include "vise/ranked_list.hpp"

namespace vise::cluster {

struct GatherResult {
  RankedList results;
  bool partial = false;                // some shard failed or timed out
  std::vector<uint32_t> failed_shards;
};

// Scatter-gather over live shards:
//   1. every shard returns its local coarse top-k_coarse; the merger k-way
//      merges by (Hamming, id) and truncates to the global k_coarse;
//   2. surviving candidates are fine-scored by their owning shards and the
//      merged float ranking is truncated to k_final.
// With per-shard budgets covering the shard, the output equals an unsharded
// two-stage search over the union inventory, tie order included. All-shard
// failure raises UnavailableError; partial failure flags the result.
GatherResult scatter_gather(std::span<ShardBackend* const> shards,
                            std::span<const float> query_embedding,
                            const index::QueryBudget& budget,
                            const index::SearchFilter& filter = {});

}  // namespace vise::cluster

#endif  // VISE_CLUSTER_SCATTER_GATHER_HPP_
