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

#ifndef VISE_ITEM_HPP_
#define VISE_ITEM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vise/binary_code.hpp"
#include "vise/embedding.hpp"
#include "vise/errors.hpp"

namespace vise {

// Commercial metadata attached to each indexed item; input to the
// quality-aware re-ranker.
struct QualityMeta {
  uint64_t sales_volume = 0;
  float percent_conversion = 0.0f;  // in [0, 1]
  float applause_rate = 0.0f;       // in [0, 1]

  void validate() const {
    if (percent_conversion < 0.0f || percent_conversion > 1.0f ||
        applause_rate < 0.0f || applause_rate > 1.0f) {
      throw InvalidValueError("quality metadata out of range");
    }
  }
};

// The indexed unit. `code` is empty until an index build (or ingestion
// dedup) binarizes the embedding.
struct Item {
  uint64_t id = 0;
  uint8_t category = 0;  // in [0, kNumCategories)
  Embedding embedding;
  BinaryCode code;
  QualityMeta quality;
};

// Column-oriented item store. Embeddings are a dense row-major n x d matrix
// so index builds and linear scans avoid per-item indirection.
class Inventory {
 public:
  Inventory() = default;
  explicit Inventory(size_t dim) : dim_(dim) {}

  size_t size() const { return ids_.size(); }
  size_t dim() const { return dim_; }
  bool empty() const { return ids_.empty(); }

  void add(uint64_t id, uint8_t category, std::span<const float> embedding,
           QualityMeta quality) {
    if (dim_ == 0 && size() == 0) dim_ = embedding.size();
    if (embedding.size() != dim_) {
      throw DimensionError("inventory: embedding dimension mismatch");
    }
    if (category >= kNumCategories) {
      throw InvalidValueError("inventory: category index out of range");
    }
    quality.validate();
    ids_.push_back(id);
    categories_.push_back(category);
    embeddings_.insert(embeddings_.end(), embedding.begin(), embedding.end());
    quality_.push_back(quality);
  }

  void add(const Item& item) {
    add(item.id, item.category, item.embedding.span(), item.quality);
  }

  uint64_t id(size_t i) const { return ids_[i]; }
  uint8_t category(size_t i) const { return categories_[i]; }
  const QualityMeta& quality(size_t i) const { return quality_[i]; }
  std::span<const float> embedding(size_t i) const {
    return {embeddings_.data() + i * dim_, dim_};
  }

  const std::vector<uint64_t>& ids() const { return ids_; }
  const std::vector<uint8_t>& categories() const { return categories_; }
  const std::vector<float>& embeddings() const { return embeddings_; }
  const std::vector<QualityMeta>& quality() const { return quality_; }

  // Stable sort of all columns by ascending id. Index builds rely on this
  // so that posting lists sorted by row index are also sorted by id.
  void sort_by_id();

  // Destructive column extraction; the inventory is spent afterwards.
  // Lets snapshot builds adopt gigabyte-scale columns without copies.
  std::vector<uint64_t> release_ids() { return std::move(ids_); }
  std::vector<uint8_t> release_categories() { return std::move(categories_); }
  std::vector<float> release_embeddings() { return std::move(embeddings_); }
  std::vector<QualityMeta> release_quality() { return std::move(quality_); }

 private:
  size_t dim_ = 0;
  std::vector<uint64_t> ids_;
  std::vector<uint8_t> categories_;
  std::vector<float> embeddings_;
  std::vector<QualityMeta> quality_;
};

}  // namespace vise

#endif  // VISE_ITEM_HPP_
