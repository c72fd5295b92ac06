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

#include "vise/ranking/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vise/errors.hpp"
#include "vise/rng.hpp"

namespace vise::ranking {

namespace {

// Saturated, well-separated pattern colors; extra patterns draw random
// corner-ish colors.
constexpr std::array<std::array<double, 3>, 8> kPalette{{
    {1.0, 0.05, 0.05},
    {0.05, 1.0, 0.05},
    {0.05, 0.05, 1.0},
    {1.0, 1.0, 0.05},
    {1.0, 0.05, 1.0},
    {0.05, 1.0, 1.0},
    {1.0, 0.55, 0.05},
    {0.35, 0.05, 0.95},
}};

std::array<double, 3> pattern_color(int pattern, Rng& rng) {
  if (pattern < static_cast<int>(kPalette.size())) {
    return kPalette[static_cast<size_t>(pattern)];
  }
  std::array<double, 3> c{};
  for (double& v : c) v = rng.next_u64() & 1 ? rng.next_double(0.8, 1.0)
                                             : rng.next_double(0.0, 0.2);
  return c;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

ToyImage render(int size, int channels, const std::array<double, 3>& color,
                const Box& box, const SyntheticConfig& cfg, Rng& rng) {
  ToyImage img = ToyImage::zeros(size, size, channels);
  std::array<double, 3> tint{};
  for (double& v : tint) v = rng.next_double(0.25, 0.75);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const bool inside = step_mask(box, img.pixel_x(j), img.pixel_y(i)) > 0.5;
      for (int c = 0; c < channels; ++c) {
        const double base = inside ? color[c % 3] : tint[c % 3];
        const double amp = inside ? cfg.pattern_noise : cfg.background_noise;
        img.at(i, j, c) = clamp01(base + rng.next_double(-amp, amp));
      }
    }
  }
  img.true_box = box;
  return img;
}

Box random_box(const SyntheticConfig& cfg, Rng& rng) {
  const double w = rng.next_double(cfg.min_box_extent, cfg.max_box_extent);
  const double h = rng.next_double(cfg.min_box_extent, cfg.max_box_extent);
  const double margin = 0.05;
  const double x_l = rng.next_double(margin, 1.0 - margin - w);
  const double y_t = rng.next_double(margin, 1.0 - margin - h);
  return {x_l, x_l + w, y_t, y_t + h};
}

}  // namespace

TripletDataset generate_triplet_dataset(const SyntheticConfig& cfg) {
  if (cfg.patterns < 2 || cfg.images_per_pattern < 2) {
    throw InvalidParamError("need >= 2 patterns and >= 2 images per pattern");
  }
  if (cfg.triplet_count < 1) {
    throw InvalidParamError("triplet_count must be >= 1");
  }
  Rng rng(cfg.seed);

  TripletDataset ds;
  std::vector<std::array<double, 3>> colors(cfg.patterns);
  for (int p = 0; p < cfg.patterns; ++p) colors[p] = pattern_color(p, rng);

  for (int p = 0; p < cfg.patterns; ++p) {
    for (int m = 0; m < cfg.images_per_pattern; ++m) {
      ds.images.push_back(render(cfg.image_size, cfg.channels, colors[p],
                                 random_box(cfg, rng), cfg, rng));
      ds.pattern_of_image.push_back(p);
    }
  }

  // Round-robin queries over the pool so every image's mask is trained.
  const uint32_t pool = static_cast<uint32_t>(ds.images.size());
  const uint32_t per_pattern = static_cast<uint32_t>(cfg.images_per_pattern);
  for (int t = 0; t < cfg.triplet_count; ++t) {
    const uint32_t q = static_cast<uint32_t>(t) % pool;
    const uint32_t pat = q / per_pattern;
    uint32_t pos = pat * per_pattern +
                   static_cast<uint32_t>(rng.next_below(per_pattern));
    while (pos == q) {
      pos = pat * per_pattern +
            static_cast<uint32_t>(rng.next_below(per_pattern));
    }
    uint32_t neg_pat =
        static_cast<uint32_t>(rng.next_below(uint64_t(cfg.patterns) - 1));
    if (neg_pat >= pat) ++neg_pat;
    const uint32_t neg = neg_pat * per_pattern +
                         static_cast<uint32_t>(rng.next_below(per_pattern));
    ds.triplets.push_back({q, pos, neg});
  }
  return ds;
}

}  // namespace vise::ranking
