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

#include "vise/index/engine.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <unordered_map>

#include "vise/distance.hpp"

namespace vise::index {

namespace {

// Enumerates all band_width-bit masks of popcount `weight`, ascending
// (Gosper's hack). weight 0 yields the single zero mask.
template <typename Fn>
void for_each_mask(uint32_t band_width, uint32_t weight, Fn&& fn) {
  if (weight == 0) {
    fn(0u);
    return;
  }
  if (weight > band_width) return;
  const uint32_t limit = 1u << band_width;
  uint32_t v = (1u << weight) - 1;
  while (v < limit) {
    fn(v);
    if (weight == band_width) break;  // single full mask
    const uint32_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
}

RankedList rank_candidates(const IndexSnapshot& snapshot,
                           const BinaryCode& query,
                           std::vector<uint32_t>& rows, size_t k) {
  std::vector<std::pair<uint32_t, uint32_t>> scored;  // (distance, row)
  scored.reserve(rows.size());
  const uint64_t* qwords = query.words.data();
  for (uint32_t row : rows) {
    const auto code = snapshot.code_words(row);
    scored.emplace_back(hamming_words(qwords, code.data(), code.size()), row);
  }
  const size_t kept = std::min(k, scored.size());
  // Rows ascend with ids, so (distance, row) order is (distance, id) order.
  std::partial_sort(scored.begin(), scored.begin() + kept, scored.end());
  RankedList out;
  out.entries.reserve(kept);
  for (size_t i = 0; i < kept; ++i) {
    out.entries.push_back(RankedEntry{snapshot.id(scored[i].second),
                                      static_cast<double>(scored[i].first),
                                      std::nullopt});
  }
  return out;
}

}  // namespace

RankedList coarse_search(const IndexSnapshot& snapshot, const BinaryCode& query,
                         const QueryBudget& budget, const SearchFilter& filter) {
  budget.validate();
  if (query.length_bits != snapshot.code_length()) {
    throw DimensionError("coarse_search: query code length mismatch");
  }
  const size_t n = snapshot.size();
  if (n == 0) return {};

  const size_t matching = filter.category
                              ? snapshot.category_count(*filter.category)
                              : n;
  std::vector<uint32_t> candidates;

  if (budget.candidate_budget >= matching) {
    // Radius exhaustion would gather every matching row; take them directly.
    candidates.reserve(matching);
    for (size_t row = 0; row < n; ++row) {
      if (filter.passes(snapshot.category(row))) {
        candidates.push_back(static_cast<uint32_t>(row));
      }
    }
    return rank_candidates(snapshot, query, candidates, budget.k_coarse);
  }

  const PostingIndex& postings = snapshot.postings();
  const uint32_t bands = postings.band_count();
  const uint32_t w = postings.band_width();
  std::vector<uint64_t> seen((n + 63) / 64, 0);
  candidates.reserve(budget.candidate_budget);

  std::vector<uint32_t> query_bands(bands);
  for (uint32_t b = 0; b < bands; ++b) {
    query_bands[b] = PostingIndex::band_value(
        {query.words.data(), query.words.size()}, b, w);
  }

  bool budget_hit = false;
  for (uint32_t radius = 0; radius <= w && !budget_hit; ++radius) {
    for (uint32_t b = 0; b < bands && !budget_hit; ++b) {
      for_each_mask(w, radius, [&](uint32_t mask) {
        if (budget_hit) return;
        for (uint32_t row : postings.postings(b, query_bands[b] ^ mask)) {
          uint64_t& word = seen[row / 64];
          const uint64_t bit = 1ULL << (row % 64);
          if (word & bit) continue;
          word |= bit;
          if (!filter.passes(snapshot.category(row))) continue;
          candidates.push_back(row);
          if (candidates.size() >= budget.candidate_budget) {
            budget_hit = true;
            return;
          }
        }
      });
    }
  }

  return rank_candidates(snapshot, query, candidates, budget.k_coarse);
}

RankedList fine_rerank(const IndexSnapshot& snapshot,
                       std::span<const float> query_embedding,
                       const RankedList& candidates, size_t k_final) {
  if (query_embedding.size() != snapshot.dim()) {
    throw DimensionError("fine_rerank: query embedding dimension mismatch");
  }
  RankedList out;
  out.entries.reserve(candidates.size());
  for (const RankedEntry& entry : candidates.entries) {
    const auto row = snapshot.find_row(entry.id);
    if (!row) {
      throw CorruptIndexError("fine_rerank: candidate id " +
                              std::to_string(entry.id) + " not in snapshot");
    }
    out.entries.push_back(RankedEntry{
        entry.id, l2_distance(query_embedding, snapshot.embedding(*row)),
        std::nullopt});
  }
  out.sort_by_distance();
  out.truncate(k_final);
  return out;
}

RankedList two_stage_search(const IndexSnapshot& snapshot,
                            std::span<const float> query_embedding,
                            const QueryBudget& budget,
                            const SearchFilter& filter) {
  const BinaryCode code = snapshot.binarize_query(query_embedding);
  const RankedList coarse = coarse_search(snapshot, code, budget, filter);
  return fine_rerank(snapshot, query_embedding, coarse, budget.k_final);
}

std::vector<size_t> dedup_rows(std::span<const uint64_t> codes,
                               size_t words_per_code, uint32_t code_length,
                               std::span<const uint64_t> ids,
                               uint32_t threshold) {
  const size_t n = ids.size();
  std::vector<size_t> kept;
  if (n == 0) return kept;

  auto code_of = [&](size_t row) {
    return codes.subspan(row * words_per_code, words_per_code);
  };

  // Pigeonhole prefilter: at Hamming distance <= t < band_count some band
  // matches exactly, so only items sharing a band need a full comparison.
  const uint32_t band_width = 16;
  const bool banded = code_length % band_width == 0 &&
                      threshold < code_length / band_width;
  if (!banded) {
    for (size_t row = 0; row < n; ++row) {
      bool duplicate = false;
      for (size_t k : kept) {
        if (hamming_words(code_of(row).data(), code_of(k).data(),
                          words_per_code) <= threshold) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) kept.push_back(row);
    }
    return kept;
  }

  const uint32_t bands = code_length / band_width;
  std::vector<std::unordered_map<uint32_t, std::vector<uint32_t>>> tables(bands);
  std::vector<uint32_t> stamp(n, 0);
  uint32_t epoch = 0;
  for (size_t row = 0; row < n; ++row) {
    ++epoch;
    bool duplicate = false;
    for (uint32_t b = 0; b < bands && !duplicate; ++b) {
      const uint32_t v = PostingIndex::band_value(code_of(row), b, band_width);
      const auto it = tables[b].find(v);
      if (it == tables[b].end()) continue;
      for (uint32_t k : it->second) {
        if (stamp[k] == epoch) continue;
        stamp[k] = epoch;
        if (hamming_words(code_of(row).data(), code_of(k).data(),
                          words_per_code) <= threshold) {
          duplicate = true;
          break;
        }
      }
    }
    if (duplicate) continue;
    kept.push_back(row);
    for (uint32_t b = 0; b < bands; ++b) {
      const uint32_t v = PostingIndex::band_value(code_of(row), b, band_width);
      tables[b][v].push_back(static_cast<uint32_t>(row));
    }
  }
  return kept;
}

std::vector<Item> dedup(std::vector<Item> items, uint32_t threshold) {
  if (items.empty()) return items;
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.id < b.id; });
  const uint32_t code_length = items.front().code.length_bits;
  const size_t words = items.front().code.words.size();
  std::vector<uint64_t> codes;
  std::vector<uint64_t> ids;
  codes.reserve(items.size() * words);
  ids.reserve(items.size());
  for (const Item& item : items) {
    if (item.code.length_bits != code_length) {
      throw DimensionError("dedup: mixed code lengths");
    }
    codes.insert(codes.end(), item.code.words.begin(), item.code.words.end());
    ids.push_back(item.id);
  }
  const auto kept = dedup_rows({codes.data(), codes.size()}, words, code_length,
                               {ids.data(), ids.size()}, threshold);
  std::vector<Item> out;
  out.reserve(kept.size());
  for (size_t row : kept) out.push_back(std::move(items[row]));
  return out;
}

}  // namespace vise::index
