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

#include "vise/mining/triplet_miner.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "vise/distance.hpp"
#include "vise/errors.hpp"

namespace vise::mining {

void ClickLogRecord::validate(size_t channel_count) const {
  if (returned.empty()) {
    throw InvalidValueError("click record: returned list empty");
  }
  if (query_features.size() != channel_count) {
    throw DimensionError("click record: query feature count != channel count");
  }
  const std::set<uint64_t> returned_set(returned.begin(), returned.end());
  for (uint64_t id : clicked) {
    if (!returned_set.contains(id)) {
      throw InvalidValueError("click record: clicked item not in returned list");
    }
  }
}

void MiningConfig::validate() const {
  if (gamma <= 0.0) throw InvalidParamError("mining: gamma must be > 0");
  if (epsilon <= 0.0) throw InvalidParamError("mining: epsilon must be > 0");
  if (batch_size < 1) throw InvalidParamError("mining: batch_size must be >= 1");
}

size_t FeatureChannels::add_channel(std::string name) {
  channels_.push_back(Channel{std::move(name), {}});
  return channels_.size() - 1;
}

void FeatureChannels::set(size_t channel, uint64_t item_id, Embedding e) {
  channels_.at(channel).features[item_id] = std::move(e);
}

const Embedding& FeatureChannels::feature(size_t channel,
                                          uint64_t item_id) const {
  const auto& chan = channels_.at(channel);
  const auto it = chan.features.find(item_id);
  if (it == chan.features.end()) {
    throw MissingFeatureError("item " + std::to_string(item_id) +
                              " missing from channel '" + chan.name + "'");
  }
  return it->second;
}

bool FeatureChannels::has_item(uint64_t item_id) const {
  for (const Channel& chan : channels_) {
    if (!chan.features.contains(item_id)) return false;
  }
  return !channels_.empty();
}

double fused_distance(uint64_t a, uint64_t b, const FeatureChannels& channels) {
  if (channels.channel_count() == 0) {
    throw MissingFeatureError("fused_distance: no channels configured");
  }
  double acc = 0.0;
  for (size_t c = 0; c < channels.channel_count(); ++c) {
    acc += l2_distance(channels.feature(c, a), channels.feature(c, b));
  }
  return acc / static_cast<double>(channels.channel_count());
}

double fused_query_distance(const ClickLogRecord& record, uint64_t item_id,
                            const FeatureChannels& channels) {
  if (channels.channel_count() == 0) {
    throw MissingFeatureError("fused_query_distance: no channels configured");
  }
  double acc = 0.0;
  for (size_t c = 0; c < channels.channel_count(); ++c) {
    acc += l2_distance(record.query_features[c], channels.feature(c, item_id));
  }
  return acc / static_cast<double>(channels.channel_count());
}

namespace {

// Sorted unique ids, split into clicked / non-clicked.
struct SplitRecord {
  std::vector<uint64_t> clicked;
  std::vector<uint64_t> nonclicked;
};

SplitRecord split_record(const ClickLogRecord& record) {
  SplitRecord out;
  std::set<uint64_t> clicked_set(record.clicked.begin(), record.clicked.end());
  std::set<uint64_t> returned_set(record.returned.begin(),
                                  record.returned.end());
  for (uint64_t id : returned_set) {
    if (clicked_set.contains(id)) {
      out.clicked.push_back(id);
    } else {
      out.nonclicked.push_back(id);
    }
  }
  return out;
}

}  // namespace

std::vector<uint64_t> filter_negatives(const ClickLogRecord& record,
                                       const FeatureChannels& channels,
                                       const MiningConfig& cfg) {
  cfg.validate();
  record.validate(channels.channel_count());
  const SplitRecord split = split_record(record);
  std::vector<uint64_t> kept;
  for (uint64_t d : split.nonclicked) {
    double nearest = fused_query_distance(record, d, channels);
    for (uint64_t c : split.clicked) {
      nearest = std::min(nearest, fused_distance(d, c, channels));
    }
    if (nearest >= cfg.gamma) kept.push_back(d);
  }
  return kept;
}

std::vector<uint64_t> filter_positives(const ClickLogRecord& record,
                                       const FeatureChannels& channels,
                                       const MiningConfig& cfg) {
  cfg.validate();
  record.validate(channels.channel_count());
  const SplitRecord split = split_record(record);
  std::vector<uint64_t> kept;
  for (uint64_t d : split.clicked) {
    if (fused_query_distance(record, d, channels) <= cfg.epsilon) {
      kept.push_back(d);
    }
  }
  return kept;
}

std::vector<Triplet> build_batch_triplets(std::span<const ClickLogRecord> records,
                                          const FeatureChannels& channels,
                                          const MiningConfig& cfg, Rng& rng,
                                          MiningStats* stats) {
  cfg.validate();
  MiningStats local;
  MiningStats& st = stats ? *stats : local;

  struct Contribution {
    uint64_t query_id;
    uint64_t positive_id;
    uint64_t negative_id;
  };
  std::vector<Contribution> contributions;
  contributions.reserve(records.size());

  for (const ClickLogRecord& record : records) {
    ++st.records_total;
    const SplitRecord split = split_record(record);
    st.clicked_total += split.clicked.size();
    st.nonclicked_total += split.nonclicked.size();

    const auto positives = filter_positives(record, channels, cfg);
    const auto negatives = filter_negatives(record, channels, cfg);
    st.positives_kept += positives.size();
    st.negatives_kept += negatives.size();
    if (positives.empty()) {
      ++st.records_skipped_no_positive;
      continue;
    }
    if (negatives.empty()) {
      ++st.records_skipped_no_negative;
      continue;
    }
    const uint64_t pos = positives[rng.next_below(positives.size())];
    const uint64_t neg = negatives[rng.next_below(negatives.size())];
    contributions.push_back({record.query_id, pos, neg});
  }

  if (contributions.empty()) {
    throw EmptyBatchError("build_batch_triplets: no record survived filtering");
  }
  st.records_contributing += contributions.size();

  // Negative sharing: m' sampled (q, q+) pairs x m' sampled negatives.
  std::vector<Triplet> triplets;
  triplets.reserve(contributions.size() * contributions.size());
  for (const Contribution& qi : contributions) {
    for (const Contribution& nj : contributions) {
      if (nj.negative_id == qi.positive_id) {
        ++st.collisions_dropped;
        continue;
      }
      triplets.push_back({qi.query_id, qi.positive_id, nj.negative_id});
    }
  }
  st.triplets_emitted += triplets.size();
  return triplets;
}

}  // namespace vise::mining
