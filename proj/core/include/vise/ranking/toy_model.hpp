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

#ifndef VISE_RANKING_TOY_MODEL_HPP_
#define VISE_RANKING_TOY_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vise/embedding.hpp"
#include "vise/ranking/mask.hpp"

namespace vise::ranking {

// Dense H x W x C image in double precision. A stand-in for real shots;
// `true_box` is evaluation-only ground truth for planted objects.
struct ToyImage {
  int height = 32;
  int width = 32;
  int channels = 3;
  std::vector<double> values;  // row-major (i, j, c)
  std::optional<Box> true_box;

  static ToyImage zeros(int h, int w, int c) {
    return ToyImage{h, w, c, std::vector<double>(size_t(h) * w * c, 0.0), {}};
  }

  double& at(int i, int j, int c) {
    return values[(size_t(i) * width + j) * channels + c];
  }
  double at(int i, int j, int c) const {
    return values[(size_t(i) * width + j) * channels + c];
  }

  // Pixel-center coordinates in normalized units.
  double pixel_x(int j) const { return (j + 0.5) / width; }
  double pixel_y(int i) const { return (i + 0.5) / height; }
};

// Linear map from mask-pooled per-channel statistics to a d'-dim vector,
// L2-normalized at the output. Weights are row-major out_dim x in_channels.
struct ToyEmbedder {
  int in_channels = 3;
  int out_dim = 32;
  std::vector<double> weights;

  static ToyEmbedder random_init(int in_channels, int out_dim, uint64_t seed);

  double weight(int o, int c) const { return weights[size_t(o) * in_channels + c]; }

  bool operator==(const ToyEmbedder&) const = default;
};

// Mask mass below this falls back to uniform pooling (with a counter bump)
// instead of dividing by a vanishing weight total.
inline constexpr double kMinMaskMass = 1e-8;

// Everything the backward pass needs from one masked-embedding forward.
struct MaskedForward {
  std::vector<double> col_x;   // X_j = s(k(x_j-x_l)) - s(k(x_j-x_r)), size W
  std::vector<double> row_y;   // Y_i, size H
  double sum_x = 0.0;          // sum_j X_j
  double sum_y = 0.0;          // sum_i Y_i
  double mass = 0.0;           // total mask weight = sum_x * sum_y
  std::vector<double> col_weighted;  // C x W: sum_i Y_i * g(i,j,c)
  std::vector<double> row_weighted;  // C x H: sum_j X_j * g(i,j,c)
  std::vector<double> pooled;        // p, size C
  std::vector<double> pre_norm;      // z = A p
  double z_norm = 0.0;
  std::vector<double> output;  // f = z / ||z||
  bool fallback = false;       // uniform pooling path taken
};

// Forward pass: pixel-wise mask weighting, mask-weighted mean pool per
// channel, linear map, L2 normalization. The mask factorizes as
// m(i,j) = X_j * Y_i, so pooling runs on row/column partial sums.
MaskedForward embed_masked_forward(const ToyImage& image, const MaskParams& mask,
                                   const ToyEmbedder& embedder);

// Spec-facing convenience: the normalized embedding only.
Embedding embed_masked(const ToyImage& image, const MaskParams& mask,
                       const ToyEmbedder& embedder,
                       uint64_t* fallback_counter = nullptr);

// Gradient of a scalar loss through one forward, given dL/df. Outputs are
// accumulated into d_weights (out_dim x C) and the four mask coordinates.
struct MaskGrad {
  double x_l = 0.0;
  double x_r = 0.0;
  double y_t = 0.0;
  double y_b = 0.0;
};

void masked_backward(const ToyImage& image, const MaskParams& mask,
                     const ToyEmbedder& embedder, const MaskedForward& fwd,
                     std::span<const double> dloss_df,
                     std::span<double> d_weights, MaskGrad& d_mask);

}  // namespace vise::ranking

#endif  // VISE_RANKING_TOY_MODEL_HPP_
