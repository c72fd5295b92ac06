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

#ifndef VISE_RANKED_LIST_HPP_
#define VISE_RANKED_LIST_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "vise/io/binary.hpp"

namespace vise {

struct RankedEntry {
  uint64_t id = 0;
  double distance = 0.0;
  std::optional<double> score;  // set by quality re-ranking

  bool operator==(const RankedEntry& other) const = default;
};

// Ordered result list. Retrieval stages keep entries ascending by
// (distance, id); quality re-ranking re-orders descending by (score, -id)
// equivalently: descending score, ties ascending id. Ids never repeat.
struct RankedList {
  std::vector<RankedEntry> entries;

  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  void sort_by_distance() {
    std::sort(entries.begin(), entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                if (a.distance != b.distance) return a.distance < b.distance;
                return a.id < b.id;
              });
  }

  void sort_by_score_desc() {
    std::sort(entries.begin(), entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                const double sa = a.score.value_or(0.0);
                const double sb = b.score.value_or(0.0);
                if (sa != sb) return sa > sb;
                return a.id < b.id;
              });
  }

  void truncate(size_t k) {
    if (entries.size() > k) entries.resize(k);
  }

  bool is_sorted_by_distance() const {
    return std::is_sorted(entries.begin(), entries.end(),
                          [](const RankedEntry& a, const RankedEntry& b) {
                            if (a.distance != b.distance) {
                              return a.distance < b.distance;
                            }
                            return a.id < b.id;
                          });
  }

  // Canonical byte serialization; determinism tests compare these.
  std::vector<uint8_t> to_bytes() const {
    io::Writer w;
    w.u64(entries.size());
    for (const RankedEntry& e : entries) {
      w.u64(e.id);
      w.f64(e.distance);
      w.u8(e.score.has_value() ? 1 : 0);
      w.f64(e.score.value_or(0.0));
    }
    return w.take();
  }

  bool operator==(const RankedList& other) const = default;
};

}  // namespace vise

#endif  // VISE_RANKED_LIST_HPP_
