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

#ifndef VISE_INDEX_SNAPSHOT_HPP_
#define VISE_INDEX_SNAPSHOT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vise/binary_code.hpp"
#include "vise/io/binary.hpp"
#include "vise/item.hpp"
#include "vise/index/posting_index.hpp"

namespace vise::index {

enum class ThresholdMode : uint8_t {
  kMedian = 0,    // per-dimension inventory medians (balanced bits)
  kZero = 1,      // sign binarization
  kExplicit = 2,  // caller-provided, e.g. cluster-wide thresholds
};

struct BuildConfig {
  uint32_t band_width = 16;
  ThresholdMode threshold_mode = ThresholdMode::kMedian;
  std::vector<float> explicit_thresholds;

  void validate(uint32_t code_length) const;
};

// Immutable single-shard index: packed codes for the coarse Hamming stage,
// float embeddings and quality metadata for the fine stage, and the banded
// posting lists. Rows are sorted ascending by item id.
class IndexSnapshot {
 public:
  static IndexSnapshot build(Inventory inventory, const BuildConfig& config);

  size_t size() const { return ids_.size(); }
  uint32_t dim() const { return dim_; }
  uint32_t code_length() const { return code_length_; }
  size_t words_per_code() const { return words_per_code_; }
  uint32_t band_width() const { return band_width_; }
  ThresholdMode threshold_mode() const { return threshold_mode_; }
  uint64_t checksum() const { return checksum_; }

  std::span<const float> thresholds() const {
    return {thresholds_.data(), thresholds_.size()};
  }
  uint64_t id(size_t row) const { return ids_[row]; }
  uint8_t category(size_t row) const { return categories_[row]; }
  const QualityMeta& quality(size_t row) const { return quality_[row]; }
  std::span<const uint64_t> code_words(size_t row) const {
    return {codes_.data() + row * words_per_code_, words_per_code_};
  }
  std::span<const float> embedding(size_t row) const {
    return {embeddings_.data() + row * dim_, dim_};
  }
  const PostingIndex& postings() const { return postings_; }
  size_t category_count(uint8_t category) const {
    return category_counts_[category];
  }

  // Binary search over the sorted id column; nullopt when absent.
  std::optional<size_t> find_row(uint64_t id) const;

  BinaryCode binarize_query(std::span<const float> embedding) const;

  // Versioned little-endian image ("PLTI"), FNV-64 checksum trailer.
  void serialize(io::Sink& sink) const;
  std::vector<uint8_t> serialize() const;
  static IndexSnapshot deserialize(io::Source& source);
  void save(const std::string& path) const;
  static IndexSnapshot load(const std::string& path);

 private:
  IndexSnapshot() = default;
  void rebuild_derived();
  void serialize_payload(io::Sink& sink) const;

  uint32_t dim_ = 0;
  uint32_t code_length_ = 0;
  size_t words_per_code_ = 0;
  uint32_t band_width_ = 16;
  ThresholdMode threshold_mode_ = ThresholdMode::kMedian;
  std::vector<float> thresholds_;
  std::vector<uint64_t> ids_;
  std::vector<uint8_t> categories_;
  std::vector<uint64_t> codes_;
  std::vector<float> embeddings_;
  std::vector<QualityMeta> quality_;
  uint64_t checksum_ = 0;

  // Derived, rebuilt on load (not part of the on-disk image).
  PostingIndex postings_;
  std::array<size_t, kNumCategories> category_counts_{};
};

// Per-dimension lower medians of a row-major embedding matrix.
std::vector<float> median_thresholds(std::span<const float> embeddings,
                                     size_t count, size_t dim);

}  // namespace vise::index

#endif  // VISE_INDEX_SNAPSHOT_HPP_
