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

#include "vise/item.hpp"

#include <algorithm>
#include <numeric>

namespace vise {

void Inventory::sort_by_id() {
  std::vector<size_t> order(size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [this](size_t a, size_t b) { return ids_[a] < ids_[b]; });

  std::vector<uint64_t> ids(size());
  std::vector<uint8_t> categories(size());
  std::vector<float> embeddings(embeddings_.size());
  std::vector<QualityMeta> quality(size());
  for (size_t i = 0; i < order.size(); ++i) {
    const size_t src = order[i];
    ids[i] = ids_[src];
    categories[i] = categories_[src];
    quality[i] = quality_[src];
    std::copy_n(embeddings_.data() + src * dim_, dim_,
                embeddings.data() + i * dim_);
  }
  ids_ = std::move(ids);
  categories_ = std::move(categories);
  embeddings_ = std::move(embeddings);
  quality_ = std::move(quality);
}

}  // namespace vise
