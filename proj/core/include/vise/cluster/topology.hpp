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

#ifndef VISE_CLUSTER_TOPOLOGY_HPP_
#define VISE_CLUSTER_TOPOLOGY_HPP_

#include <cstdint>
#include <vector>

#include "vise/errors.hpp"
#include "vise/item.hpp"
#include "vise/rng.hpp"

namespace vise::cluster {

struct ClusterTopology {
  uint32_t shard_count = 1;         // S
  uint32_t replication_factor = 1;  // R

  void validate() const {
    if (shard_count < 1 || replication_factor < 1) {
      throw InvalidParamError("topology: S and R must be >= 1");
    }
  }
};

// Deterministic shard assignment: splitmix64(id) mod S. Hashing (rather
// than category) keeps shard loads balanced; category filtering happens
// inside each shard at query time.
inline uint32_t shard_of(uint64_t item_id, uint32_t shard_count) {
  return static_cast<uint32_t>(splitmix64(item_id) % shard_count);
}

// Disjoint cover of the inventory, one sub-inventory per shard.
std::vector<Inventory> partition(const Inventory& inventory,
                                 const ClusterTopology& topology);

// Round-robin query-to-replica assignment: query i goes to replica i mod R.
// Any window of Q consecutive queries loads each replica with floor(Q/R) to
// ceil(Q/R) queries.
class RoundRobinRouter {
 public:
  explicit RoundRobinRouter(uint32_t replication_factor)
      : replicas_(replication_factor) {
    if (replication_factor < 1) {
      throw InvalidParamError("router: R must be >= 1");
    }
  }

  uint32_t next() {
    const uint32_t r = static_cast<uint32_t>(counter_ % replicas_);
    ++counter_;
    return r;
  }

  uint32_t replicas() const { return replicas_; }

 private:
  uint32_t replicas_;
  uint64_t counter_ = 0;
};

// Assignment for a fixed query stream; index i holds query i's replica.
std::vector<uint32_t> route(size_t query_count, uint32_t replication_factor);

}  // namespace vise::cluster

#endif  // VISE_CLUSTER_TOPOLOGY_HPP_
