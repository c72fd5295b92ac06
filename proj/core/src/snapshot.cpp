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

#include "vise/index/snapshot.hpp"

#include <algorithm>
#include <string>

namespace vise::index {

void BuildConfig::validate(uint32_t code_length) const {
  if (band_width == 0 || band_width > 16 || 64 % band_width != 0 ||
      code_length % band_width != 0) {
    throw BuildError("band_width must divide 64 and the code length, max 16");
  }
  if (threshold_mode == ThresholdMode::kExplicit &&
      explicit_thresholds.size() != code_length) {
    throw BuildError("explicit thresholds must match the embedding dimension");
  }
}

std::vector<float> median_thresholds(std::span<const float> embeddings,
                                     size_t count, size_t dim) {
  std::vector<float> thresholds(dim, 0.0f);
  if (count == 0) return thresholds;
  std::vector<float> column(count);
  for (size_t d = 0; d < dim; ++d) {
    for (size_t i = 0; i < count; ++i) column[i] = embeddings[i * dim + d];
    const size_t mid = (count - 1) / 2;  // lower median
    std::nth_element(column.begin(), column.begin() + mid, column.end());
    thresholds[d] = column[mid];
  }
  return thresholds;
}

IndexSnapshot IndexSnapshot::build(Inventory inventory,
                                   const BuildConfig& config) {
  inventory.sort_by_id();
  const size_t n = inventory.size();
  for (size_t i = 1; i < n; ++i) {
    if (inventory.id(i) == inventory.id(i - 1)) {
      throw BuildError("duplicate item id " + std::to_string(inventory.id(i)));
    }
  }

  IndexSnapshot snap;
  snap.dim_ = static_cast<uint32_t>(inventory.dim());
  snap.code_length_ = snap.dim_;  // one bit per dimension
  snap.words_per_code_ = BinaryCode::words_for(snap.code_length_);
  config.validate(snap.code_length_);
  snap.band_width_ = config.band_width;
  snap.threshold_mode_ = config.threshold_mode;

  switch (config.threshold_mode) {
    case ThresholdMode::kMedian:
      snap.thresholds_ = median_thresholds(
          {inventory.embeddings().data(), inventory.embeddings().size()}, n,
          snap.dim_);
      break;
    case ThresholdMode::kZero:
      snap.thresholds_.assign(snap.dim_, 0.0f);
      break;
    case ThresholdMode::kExplicit:
      snap.thresholds_ = config.explicit_thresholds;
      break;
  }

  snap.codes_.assign(n * snap.words_per_code_, 0);
  for (size_t i = 0; i < n; ++i) {
    const BinaryCode code = binarize(inventory.embedding(i), snap.thresholds());
    std::copy(code.words.begin(), code.words.end(),
              snap.codes_.begin() + i * snap.words_per_code_);
  }

  snap.ids_ = inventory.release_ids();
  snap.categories_ = inventory.release_categories();
  snap.quality_ = inventory.release_quality();
  snap.embeddings_ = inventory.release_embeddings();

  snap.rebuild_derived();

  io::HashingSink hasher(nullptr);
  snap.checksum_ = 0;
  snap.serialize_payload(hasher);
  snap.checksum_ = hasher.digest();
  return snap;
}

void IndexSnapshot::rebuild_derived() {
  postings_ = PostingIndex::build({codes_.data(), codes_.size()},
                                  words_per_code_, code_length_, band_width_);
  category_counts_.fill(0);
  for (uint8_t c : categories_) ++category_counts_[c];
}

std::optional<size_t> IndexSnapshot::find_row(uint64_t id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<size_t>(it - ids_.begin());
}

BinaryCode IndexSnapshot::binarize_query(
    std::span<const float> embedding) const {
  if (embedding.size() != dim_) {
    throw DimensionError("query embedding dimension mismatch");
  }
  return binarize(embedding, thresholds());
}

void IndexSnapshot::serialize_payload(io::Sink& sink) const {
  sink.magic("PLTI");
  sink.u32(1);  // version
  sink.u32(dim_);
  sink.u32(code_length_);
  sink.u32(band_width_);
  sink.u64(ids_.size());
  sink.u8(static_cast<uint8_t>(threshold_mode_));
  for (float t : thresholds_) sink.f32(t);
  for (uint64_t id : ids_) sink.u64(id);
  if (!categories_.empty()) sink.write(categories_.data(), categories_.size());
  for (uint64_t w : codes_) sink.u64(w);
  for (float v : embeddings_) sink.f32(v);
  for (const QualityMeta& q : quality_) {
    sink.u64(q.sales_volume);
    sink.f32(q.percent_conversion);
    sink.f32(q.applause_rate);
  }
}

void IndexSnapshot::serialize(io::Sink& sink) const {
  io::HashingSink hashed(&sink);
  serialize_payload(hashed);
  sink.u64(hashed.digest());
}

std::vector<uint8_t> IndexSnapshot::serialize() const {
  io::VectorSink sink;
  serialize(sink);
  return sink.take();
}

IndexSnapshot IndexSnapshot::deserialize(io::Source& source) {
  io::HashingSource hashed(&source);
  IndexSnapshot snap;
  hashed.expect_magic("PLTI");
  const uint32_t version = hashed.u32();
  if (version != 1) {
    throw CorruptIndexError("unsupported snapshot version " +
                            std::to_string(version));
  }
  snap.dim_ = hashed.u32();
  snap.code_length_ = hashed.u32();
  snap.band_width_ = hashed.u32();
  const uint64_t n = hashed.u64();
  const uint8_t mode = hashed.u8();
  if (mode > 2) throw CorruptIndexError("bad threshold mode");
  snap.threshold_mode_ = static_cast<ThresholdMode>(mode);
  if (snap.code_length_ != snap.dim_) {
    throw CorruptIndexError("snapshot code length != dimension");
  }
  snap.words_per_code_ = BinaryCode::words_for(snap.code_length_);

  snap.thresholds_.resize(snap.dim_);
  for (float& t : snap.thresholds_) t = hashed.f32();
  snap.ids_.resize(n);
  for (uint64_t& id : snap.ids_) id = hashed.u64();
  snap.categories_.resize(n);
  if (n > 0) hashed.read(snap.categories_.data(), n);
  snap.codes_.resize(n * snap.words_per_code_);
  for (uint64_t& w : snap.codes_) w = hashed.u64();
  snap.embeddings_.resize(n * snap.dim_);
  for (float& v : snap.embeddings_) v = hashed.f32();
  snap.quality_.resize(n);
  for (QualityMeta& q : snap.quality_) {
    q.sales_volume = hashed.u64();
    q.percent_conversion = hashed.f32();
    q.applause_rate = hashed.f32();
  }
  const uint64_t computed = hashed.digest();
  const uint64_t stored = source.u64();
  if (computed != stored) {
    throw CorruptIndexError("snapshot checksum mismatch");
  }
  snap.checksum_ = computed;

  if (!std::is_sorted(snap.ids_.begin(), snap.ids_.end())) {
    throw CorruptIndexError("snapshot ids not sorted");
  }
  for (uint8_t c : snap.categories_) {
    if (c >= kNumCategories) throw CorruptIndexError("bad category value");
  }
  snap.rebuild_derived();
  return snap;
}

void IndexSnapshot::save(const std::string& path) const {
  io::FileSink sink(path);
  serialize(sink);
}

IndexSnapshot IndexSnapshot::load(const std::string& path) {
  io::FileSource source(path);
  return deserialize(source);
}

}  // namespace vise::index
