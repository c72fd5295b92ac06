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

#ifndef VISE_INDEX_POSTING_INDEX_HPP_
#define VISE_INDEX_POSTING_INDEX_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vise/errors.hpp"

namespace vise::index {

// Banded inverted index over packed binary codes (multi-index style).
// The code is cut into band_count disjoint bands of band_width bits; each
// band keeps one CSR table from band value to ascending row ids. Rows are
// snapshot positions, which are sorted by item id, so per-value posting
// lists are sorted by id as well.
class PostingIndex {
 public:
  PostingIndex() = default;

  // codes: row-major packed words, words_per_code per row. band_width must
  // divide 64 and the code length, and stay <= 16 (direct-address tables).
  static PostingIndex build(std::span<const uint64_t> codes,
                            size_t words_per_code, uint32_t code_length,
                            uint32_t band_width);

  uint32_t band_count() const { return band_count_; }
  uint32_t band_width() const { return band_width_; }

  static uint32_t band_value(std::span<const uint64_t> code_words,
                             uint32_t band, uint32_t band_width) {
    const uint32_t bit = band * band_width;
    return static_cast<uint32_t>((code_words[bit / 64] >> (bit % 64)) &
                                 ((1ull << band_width) - 1));
  }

  std::span<const uint32_t> postings(uint32_t band, uint32_t value) const {
    const auto& offsets = offsets_[band];
    return {rows_[band].data() + offsets[value],
            offsets[value + 1] - offsets[value]};
  }

 private:
  uint32_t band_count_ = 0;
  uint32_t band_width_ = 0;
  std::vector<std::vector<uint32_t>> offsets_;  // per band: 2^w + 1 entries
  std::vector<std::vector<uint32_t>> rows_;     // per band: one row per item
};

}  // namespace vise::index

#endif  // VISE_INDEX_POSTING_INDEX_HPP_
