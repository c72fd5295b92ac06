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

#include "vise/index/posting_index.hpp"

#include <string>

namespace vise::index {

PostingIndex PostingIndex::build(std::span<const uint64_t> codes,
                                 size_t words_per_code, uint32_t code_length,
                                 uint32_t band_width) {
  if (band_width == 0 || band_width > 16 || 64 % band_width != 0 ||
      code_length % band_width != 0) {
    throw BuildError("band_width must divide 64 and the code length, max 16");
  }
  PostingIndex idx;
  idx.band_width_ = band_width;
  idx.band_count_ = code_length / band_width;
  const size_t n = words_per_code == 0 ? 0 : codes.size() / words_per_code;
  const size_t table = size_t{1} << band_width;

  idx.offsets_.resize(idx.band_count_);
  idx.rows_.resize(idx.band_count_);
  for (uint32_t b = 0; b < idx.band_count_; ++b) {
    auto& offsets = idx.offsets_[b];
    auto& rows = idx.rows_[b];
    offsets.assign(table + 1, 0);
    rows.resize(n);
    // Counting sort by band value; rows stay ascending within each value.
    for (size_t row = 0; row < n; ++row) {
      const uint32_t v = band_value(
          codes.subspan(row * words_per_code, words_per_code), b, band_width);
      ++offsets[v + 1];
    }
    for (size_t v = 0; v < table; ++v) offsets[v + 1] += offsets[v];
    std::vector<uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (size_t row = 0; row < n; ++row) {
      const uint32_t v = band_value(
          codes.subspan(row * words_per_code, words_per_code), b, band_width);
      rows[cursor[v]++] = static_cast<uint32_t>(row);
    }
  }
  return idx;
}

}  // namespace vise::index
