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

#include "vise/cluster/scatter_gather.hpp"
#include "vise/cluster/topology.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "vise/distance.hpp"

namespace vise::cluster {

std::vector<Inventory> partition(const Inventory& inventory,
                                 const ClusterTopology& topology) {
  topology.validate();
  std::vector<Inventory> shards(topology.shard_count,
                                Inventory(inventory.dim()));
  for (size_t i = 0; i < inventory.size(); ++i) {
    const uint32_t s = shard_of(inventory.id(i), topology.shard_count);
    shards[s].add(inventory.id(i), inventory.category(i),
                  inventory.embedding(i), inventory.quality(i));
  }
  return shards;
}

std::vector<uint32_t> route(size_t query_count, uint32_t replication_factor) {
  RoundRobinRouter router(replication_factor);
  std::vector<uint32_t> assignment(query_count);
  for (uint32_t& r : assignment) r = router.next();
  return assignment;
}

ShardCoarseResult LocalShard::coarse(std::span<const float> query_embedding,
                                     const index::QueryBudget& budget,
                                     const index::SearchFilter& filter) {
  ShardCoarseResult result;
  result.shard_id = shard_id_;
  const BinaryCode code = snapshot_->binarize_query(query_embedding);
  const RankedList ranked =
      index::coarse_search(*snapshot_, code, budget, filter);
  result.hits.reserve(ranked.size());
  for (const RankedEntry& e : ranked.entries) {
    result.hits.push_back({e.id, static_cast<uint32_t>(e.distance)});
  }
  return result;
}

ShardFineResult LocalShard::fine_score(std::span<const float> query_embedding,
                                       std::span<const uint64_t> ids) {
  ShardFineResult result;
  result.shard_id = shard_id_;
  result.hits.reserve(ids.size());
  for (uint64_t id : ids) {
    const auto row = snapshot_->find_row(id);
    if (!row) {
      throw CorruptIndexError("fine_score: id not owned by shard");
    }
    result.hits.push_back(
        {id, l2_distance(query_embedding, snapshot_->embedding(*row))});
  }
  return result;
}

namespace {

// Runs one callable per shard on its own thread; exceptions become kFailed.
template <typename Result, typename Fn>
std::vector<Result> run_scattered(size_t count, Fn&& fn) {
  std::vector<Result> results(count);
  std::vector<std::thread> workers;
  workers.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    workers.emplace_back([&, i] {
      try {
        results[i] = fn(i);
      } catch (...) {
        results[i].status = ShardStatus::kFailed;
        results[i].hits.clear();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  return results;
}

}  // namespace

GatherResult scatter_gather(std::span<ShardBackend* const> shards,
                            std::span<const float> query_embedding,
                            const index::QueryBudget& budget,
                            const index::SearchFilter& filter) {
  if (shards.empty()) throw UnavailableError("scatter_gather: no shards");
  budget.validate();

  GatherResult gathered;

  // Stage 1: coarse scatter + merge by (Hamming distance, id).
  auto coarse_results = run_scattered<ShardCoarseResult>(
      shards.size(), [&](size_t i) {
        ShardCoarseResult r =
            shards[i]->coarse(query_embedding, budget, filter);
        r.shard_id = shards[i]->shard_id();
        return r;
      });

  struct MergedHit {
    uint32_t distance;
    uint64_t id;
    size_t shard_index;
    bool operator<(const MergedHit& other) const {
      if (distance != other.distance) return distance < other.distance;
      return id < other.id;
    }
  };
  std::vector<MergedHit> merged;
  size_t live = 0;
  for (size_t i = 0; i < coarse_results.size(); ++i) {
    const ShardCoarseResult& r = coarse_results[i];
    if (r.status != ShardStatus::kOk) {
      gathered.partial = true;
      gathered.failed_shards.push_back(shards[i]->shard_id());
      continue;
    }
    ++live;
    for (const CoarseHit& h : r.hits) merged.push_back({h.distance, h.id, i});
  }
  if (live == 0) {
    throw UnavailableError("scatter_gather: all shards failed");
  }
  std::sort(merged.begin(), merged.end());
  if (merged.size() > budget.k_coarse) merged.resize(budget.k_coarse);

  // Stage 2: fine-score the merged candidates on their owning shards.
  std::map<size_t, std::vector<uint64_t>> by_shard;
  for (const MergedHit& h : merged) by_shard[h.shard_index].push_back(h.id);
  std::vector<size_t> shard_index;
  std::vector<std::span<const uint64_t>> id_groups;
  for (const auto& [idx, ids] : by_shard) {
    shard_index.push_back(idx);
    id_groups.emplace_back(ids.data(), ids.size());
  }
  auto fine_results = run_scattered<ShardFineResult>(
      shard_index.size(), [&](size_t g) {
        ShardFineResult r =
            shards[shard_index[g]]->fine_score(query_embedding, id_groups[g]);
        r.shard_id = shards[shard_index[g]]->shard_id();
        return r;
      });

  for (size_t g = 0; g < fine_results.size(); ++g) {
    const ShardFineResult& r = fine_results[g];
    if (r.status != ShardStatus::kOk) {
      gathered.partial = true;
      gathered.failed_shards.push_back(shards[shard_index[g]]->shard_id());
      continue;
    }
    for (const FineHit& h : r.hits) {
      gathered.results.entries.push_back(
          RankedEntry{h.id, h.distance, std::nullopt});
    }
  }
  if (gathered.results.empty() && !merged.empty()) {
    throw UnavailableError("scatter_gather: all fine-score calls failed");
  }
  gathered.results.sort_by_distance();
  gathered.results.truncate(budget.k_final);
  return gathered;
}

}  // namespace vise::cluster
