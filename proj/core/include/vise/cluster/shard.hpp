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

#ifndef VISE_CLUSTER_SHARD_HPP_
#define VISE_CLUSTER_SHARD_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "vise/embedding.hpp"
#include "vise/index/engine.hpp"
#include "vise/index/snapshot.hpp"

namespace vise::cluster {

enum class ShardStatus : uint8_t { kOk = 0, kFailed = 1, kTimeout = 2 };

struct CoarseHit {
  uint64_t id = 0;
  uint32_t distance = 0;  // full-code Hamming
};

struct FineHit {
  uint64_t id = 0;
  double distance = 0.0;  // float L2
};

struct ShardCoarseResult {
  uint32_t shard_id = 0;
  ShardStatus status = ShardStatus::kOk;
  std::vector<CoarseHit> hits;  // empty unless status == kOk
};

struct ShardFineResult {
  uint32_t shard_id = 0;
  ShardStatus status = ShardStatus::kOk;
  std::vector<FineHit> hits;
};

// One index shard, local or remote. The merger runs retrieval in two
// scattered stages so the fused result matches an unsharded index exactly:
// coarse Hamming candidates are merged globally before any float scoring.
class ShardBackend {
 public:
  virtual ~ShardBackend() = default;

  virtual uint32_t shard_id() const = 0;

  // Local coarse top-k_coarse by full-code Hamming (ties by id).
  virtual ShardCoarseResult coarse(std::span<const float> query_embedding,
                                   const index::QueryBudget& budget,
                                   const index::SearchFilter& filter) = 0;

  // Exact float distances for candidate ids owned by this shard.
  virtual ShardFineResult fine_score(std::span<const float> query_embedding,
                                     std::span<const uint64_t> ids) = 0;
};

// In-process shard over an immutable snapshot.
class LocalShard : public ShardBackend {
 public:
  LocalShard(uint32_t shard_id, std::shared_ptr<const index::IndexSnapshot> snap)
      : shard_id_(shard_id), snapshot_(std::move(snap)) {}

  uint32_t shard_id() const override { return shard_id_; }

  ShardCoarseResult coarse(std::span<const float> query_embedding,
                           const index::QueryBudget& budget,
                           const index::SearchFilter& filter) override;

  ShardFineResult fine_score(std::span<const float> query_embedding,
                             std::span<const uint64_t> ids) override;

  const index::IndexSnapshot& snapshot() const { return *snapshot_; }

 private:
  uint32_t shard_id_;
  std::shared_ptr<const index::IndexSnapshot> snapshot_;
};

}  // namespace vise::cluster

#endif  // VISE_CLUSTER_SHARD_HPP_
