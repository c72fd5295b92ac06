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

#ifndef VISE_RANKING_SYNTHETIC_HPP_
#define VISE_RANKING_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "vise/ranking/toy_model.hpp"

namespace vise::ranking {

// Triplet of image indices into a shared image pool.
struct ImageTriplet {
  uint32_t query = 0;
  uint32_t positive = 0;
  uint32_t negative = 0;
};

struct TripletDataset {
  std::vector<ToyImage> images;
  std::vector<ImageTriplet> triplets;
  std::vector<int> pattern_of_image;  // which planted pattern each image holds
};

struct SyntheticConfig {
  uint64_t seed = 1;
  int image_size = 32;
  int channels = 3;
  int patterns = 8;            // distinct planted pattern colors
  int images_per_pattern = 6;  // pool images per pattern
  int triplet_count = 200;
  double min_box_extent = 0.25;  // planted box width/height range
  double max_box_extent = 0.50;
  double background_noise = 0.10;  // per-pixel uniform noise amplitude
  double pattern_noise = 0.04;     // texture noise inside the planted box
};

// Image pool with planted colored rectangles: query/positive pairs share a
// pattern on different backgrounds and box positions; negatives hold a
// different pattern. Every pool image appears as a query (round-robin), so
// each per-image mask receives attractive gradient during training.
TripletDataset generate_triplet_dataset(const SyntheticConfig& cfg);

}  // namespace vise::ranking

#endif  // VISE_RANKING_SYNTHETIC_HPP_
