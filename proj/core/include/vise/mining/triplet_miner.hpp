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

#ifndef VISE_MINING_TRIPLET_MINER_HPP_
#define VISE_MINING_TRIPLET_MINER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vise/embedding.hpp"
#include "vise/rng.hpp"

namespace vise::mining {

// One page-view log entry: what a query returned and what the user clicked.
struct ClickLogRecord {
  uint64_t query_id = 0;
  std::vector<Embedding> query_features;  // one embedding per channel
  std::vector<uint64_t> returned;
  std::vector<uint64_t> clicked;  // subset of returned

  void validate(size_t channel_count) const;
};

// Named embedding spaces per item (e.g. local / previous-version /
// pretrained features). Ordered; every mined item must be present in all.
class FeatureChannels {
 public:
  size_t add_channel(std::string name);

  void set(size_t channel, uint64_t item_id, Embedding e);

  size_t channel_count() const { return channels_.size(); }
  const std::string& name(size_t channel) const {
    return channels_[channel].name;
  }

  // Throws MissingFeatureError when the item has no entry in the channel.
  const Embedding& feature(size_t channel, uint64_t item_id) const;

  bool has_item(uint64_t item_id) const;

 private:
  struct Channel {
    std::string name;
    std::unordered_map<uint64_t, Embedding> features;
  };
  std::vector<Channel> channels_;
};

struct Triplet {
  uint64_t query_id = 0;
  uint64_t positive_id = 0;
  uint64_t negative_id = 0;

  bool operator==(const Triplet&) const = default;
};

struct MiningConfig {
  double gamma = 0.4;    // negative filter threshold
  double epsilon = 0.4;  // positive filter threshold
  int batch_size = 16;   // records per mini-batch before negative sharing

  void validate() const;
};

struct MiningStats {
  uint64_t records_total = 0;
  uint64_t records_contributing = 0;
  uint64_t records_skipped_no_positive = 0;
  uint64_t records_skipped_no_negative = 0;
  uint64_t clicked_total = 0;
  uint64_t positives_kept = 0;
  uint64_t nonclicked_total = 0;
  uint64_t negatives_kept = 0;
  uint64_t triplets_emitted = 0;
  uint64_t collisions_dropped = 0;
};

// Mean of per-channel L2 distances between two items.
double fused_distance(uint64_t a, uint64_t b, const FeatureChannels& channels);

// Mean of per-channel L2 distances between a record's query and an item.
double fused_query_distance(const ClickLogRecord& record, uint64_t item_id,
                            const FeatureChannels& channels);

// Kept non-clicked items: min(dist(d, q), min over clicked of dist(d, c))
// >= gamma. Ascending id order; may be empty.
std::vector<uint64_t> filter_negatives(const ClickLogRecord& record,
                                       const FeatureChannels& channels,
                                       const MiningConfig& cfg);

// Kept clicked items: dist(d, q) <= epsilon. Ascending id order.
std::vector<uint64_t> filter_positives(const ClickLogRecord& record,
                                       const FeatureChannels& channels,
                                       const MiningConfig& cfg);

// One mini-batch of records -> shared-negative triplets. Each contributing
// record samples one positive and one negative uniformly from its filtered
// sets; every query is then paired with all m' sampled negatives, for m'^2
// triplets minus those whose shared negative equals the query's positive.
// Throws EmptyBatchError when no record survives filtering.
std::vector<Triplet> build_batch_triplets(std::span<const ClickLogRecord> records,
                                          const FeatureChannels& channels,
                                          const MiningConfig& cfg, Rng& rng,
                                          MiningStats* stats = nullptr);

}  // namespace vise::mining

#endif  // VISE_MINING_TRIPLET_MINER_HPP_
