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

#ifndef VISE_INDEX_ENGINE_HPP_
#define VISE_INDEX_ENGINE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vise/binary_code.hpp"
#include "vise/item.hpp"
#include "vise/ranked_list.hpp"
#include "vise/index/snapshot.hpp"

namespace vise::index {

// Paper-scale defaults: return 1200 coarse candidates, re-rank the top 60,
// and cap the coarse filter at 200 x K_coarse gathered candidates.
struct QueryBudget {
  size_t k_coarse = 1200;
  size_t k_final = 60;
  size_t candidate_budget = 200 * 1200;

  void validate() const {
    if (k_final > k_coarse || k_coarse > candidate_budget) {
      throw InvalidParamError(
          "budget: need k_final <= k_coarse <= candidate_budget");
    }
    if (k_final == 0) throw InvalidParamError("budget: k_final must be >= 1");
  }
};

// Optional per-query restriction (category filtering happens inside shards).
struct SearchFilter {
  std::optional<uint8_t> category;

  bool passes(uint8_t cat) const { return !category || *category == cat; }
};

// Stage 1: gather candidates from the banded posting lists, expanding the
// per-band probe radius 0, 1, 2, ... until the candidate budget is reached
// or every radius is exhausted (which covers the whole shard). Candidates
// are then ranked by full-code Hamming distance, ties ascending id, and the
// top k_coarse returned. Gathering order is deterministic, so a smaller
// budget always yields a prefix of a larger budget's candidate set.
RankedList coarse_search(const IndexSnapshot& snapshot, const BinaryCode& query,
                         const QueryBudget& budget,
                         const SearchFilter& filter = {});

// Stage 2: re-score coarse candidates by exact float L2 distance against the
// stored embeddings; top k_final, ties ascending id. Candidate ids must
// exist in the snapshot.
RankedList fine_rerank(const IndexSnapshot& snapshot,
                       std::span<const float> query_embedding,
                       const RankedList& candidates, size_t k_final);

// Both stages back to back.
RankedList two_stage_search(const IndexSnapshot& snapshot,
                            std::span<const float> query_embedding,
                            const QueryBudget& budget,
                            const SearchFilter& filter = {});

// Greedy near-duplicate removal in ascending id order: an item is dropped
// when its code lies within Hamming distance `threshold` of an already-kept
// item. Returns kept positions of the (id-sorted) input rows.
std::vector<size_t> dedup_rows(std::span<const uint64_t> codes,
                               size_t words_per_code, uint32_t code_length,
                               std::span<const uint64_t> ids,
                               uint32_t threshold);

// Item-level wrapper; items must carry codes of equal length.
std::vector<Item> dedup(std::vector<Item> items, uint32_t threshold);

}  // namespace vise::index

#endif  // VISE_INDEX_ENGINE_HPP_
