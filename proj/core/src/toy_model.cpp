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

#include "vise/ranking/toy_model.hpp"

#include <cmath>

#include "vise/errors.hpp"
#include "vise/rng.hpp"

namespace vise::ranking {

ToyEmbedder ToyEmbedder::random_init(int in_channels, int out_dim,
                                     uint64_t seed) {
  if (in_channels < 1 || out_dim < 1) {
    throw InvalidParamError("embedder dimensions must be >= 1");
  }
  ToyEmbedder e;
  e.in_channels = in_channels;
  e.out_dim = out_dim;
  e.weights.resize(size_t(out_dim) * in_channels);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_channels));
  for (double& w : e.weights) w = rng.next_normal() * scale;
  return e;
}

MaskedForward embed_masked_forward(const ToyImage& image, const MaskParams& mask,
                                   const ToyEmbedder& embedder) {
  mask.validate();
  const int H = image.height;
  const int W = image.width;
  const int C = image.channels;
  if (C != embedder.in_channels) {
    throw DimensionError("embedder expects " +
                         std::to_string(embedder.in_channels) + " channels");
  }

  MaskedForward fwd;
  fwd.col_x.resize(W);
  fwd.row_y.resize(H);
  for (int j = 0; j < W; ++j) {
    const double x = image.pixel_x(j);
    fwd.col_x[j] = sigmoid(mask.k * (x - mask.x_l)) -
                   sigmoid(mask.k * (x - mask.x_r));
    fwd.sum_x += fwd.col_x[j];
  }
  for (int i = 0; i < H; ++i) {
    const double y = image.pixel_y(i);
    fwd.row_y[i] = sigmoid(mask.k * (y - mask.y_t)) -
                   sigmoid(mask.k * (y - mask.y_b));
    fwd.sum_y += fwd.row_y[i];
  }
  fwd.mass = fwd.sum_x * fwd.sum_y;

  fwd.col_weighted.assign(size_t(C) * W, 0.0);
  fwd.row_weighted.assign(size_t(C) * H, 0.0);
  for (int i = 0; i < H; ++i) {
    const double yi = fwd.row_y[i];
    for (int j = 0; j < W; ++j) {
      const double xj = fwd.col_x[j];
      for (int c = 0; c < C; ++c) {
        const double g = image.at(i, j, c);
        fwd.col_weighted[size_t(c) * W + j] += yi * g;
        fwd.row_weighted[size_t(c) * H + i] += xj * g;
      }
    }
  }

  fwd.pooled.assign(C, 0.0);
  fwd.fallback = fwd.mass <= kMinMaskMass;
  if (fwd.fallback) {
    // Degenerate mask: fall back to an unweighted mean so pooling stays
    // finite. Mask gradients vanish on this path.
    const double inv = 1.0 / (double(H) * W);
    for (int i = 0; i < H; ++i) {
      for (int j = 0; j < W; ++j) {
        for (int c = 0; c < C; ++c) fwd.pooled[c] += image.at(i, j, c) * inv;
      }
    }
  } else {
    for (int c = 0; c < C; ++c) {
      double s = 0.0;
      for (int j = 0; j < W; ++j) {
        s += fwd.col_x[j] * fwd.col_weighted[size_t(c) * W + j];
      }
      fwd.pooled[c] = s / fwd.mass;
    }
  }

  fwd.pre_norm.assign(embedder.out_dim, 0.0);
  for (int o = 0; o < embedder.out_dim; ++o) {
    double z = 0.0;
    for (int c = 0; c < C; ++c) z += embedder.weight(o, c) * fwd.pooled[c];
    fwd.pre_norm[o] = z;
  }
  double norm_sq = 0.0;
  for (double z : fwd.pre_norm) norm_sq += z * z;
  fwd.z_norm = std::sqrt(norm_sq);
  if (!(fwd.z_norm > 1e-12)) {
    throw InvalidValueError("embed_masked: pre-normalization output ~ 0");
  }
  fwd.output.resize(embedder.out_dim);
  for (int o = 0; o < embedder.out_dim; ++o) {
    fwd.output[o] = fwd.pre_norm[o] / fwd.z_norm;
  }
  return fwd;
}

Embedding embed_masked(const ToyImage& image, const MaskParams& mask,
                       const ToyEmbedder& embedder, uint64_t* fallback_counter) {
  const MaskedForward fwd = embed_masked_forward(image, mask, embedder);
  if (fwd.fallback && fallback_counter) ++*fallback_counter;
  std::vector<float> out(fwd.output.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(fwd.output[i]);
  }
  // Renormalize in float so the Embedding invariant holds after rounding.
  return Embedding::make_unit(std::move(out));
}

void masked_backward(const ToyImage& image, const MaskParams& mask,
                     const ToyEmbedder& embedder, const MaskedForward& fwd,
                     std::span<const double> dloss_df,
                     std::span<double> d_weights, MaskGrad& d_mask) {
  const int H = image.height;
  const int W = image.width;
  const int C = image.channels;

  // f = z / ||z||  =>  dL/dz = (g - f (f . g)) / ||z||
  double fg = 0.0;
  for (int o = 0; o < embedder.out_dim; ++o) fg += fwd.output[o] * dloss_df[o];
  std::vector<double> dz(embedder.out_dim);
  for (int o = 0; o < embedder.out_dim; ++o) {
    dz[o] = (dloss_df[o] - fwd.output[o] * fg) / fwd.z_norm;
  }

  // z = A p
  std::vector<double> dp(C, 0.0);
  for (int o = 0; o < embedder.out_dim; ++o) {
    for (int c = 0; c < C; ++c) {
      d_weights[size_t(o) * C + c] += dz[o] * fwd.pooled[c];
      dp[c] += embedder.weight(o, c) * dz[o];
    }
  }

  if (fwd.fallback) return;  // uniform pooling: no mask dependence

  // p_c = S_c / mass with S_c = sum_j X_j col_weighted[c][j]. For any edge
  // coordinate t: dp_c/dt = (dS_c/dt - p_c dmass/dt) / mass, and the mask
  // factorization keeps everything in row/column sums.
  std::vector<double> col_dot(W, 0.0);  // sum_c dp_c col_weighted[c][j]
  std::vector<double> row_dot(H, 0.0);  // sum_c dp_c row_weighted[c][i]
  double p_dot = 0.0;                   // sum_c dp_c p_c
  for (int c = 0; c < C; ++c) {
    p_dot += dp[c] * fwd.pooled[c];
    for (int j = 0; j < W; ++j) col_dot[j] += dp[c] * fwd.col_weighted[size_t(c) * W + j];
    for (int i = 0; i < H; ++i) row_dot[i] += dp[c] * fwd.row_weighted[size_t(c) * H + i];
  }

  double sum_dxl = 0.0, sum_dxr = 0.0, dot_dxl = 0.0, dot_dxr = 0.0;
  for (int j = 0; j < W; ++j) {
    const double x = image.pixel_x(j);
    const double sl = sigmoid(mask.k * (x - mask.x_l));
    const double sr = sigmoid(mask.k * (x - mask.x_r));
    const double dxl = -mask.k * sl * (1.0 - sl);  // dX_j/dx_l
    const double dxr = mask.k * sr * (1.0 - sr);   // dX_j/dx_r
    sum_dxl += dxl;
    sum_dxr += dxr;
    dot_dxl += dxl * col_dot[j];
    dot_dxr += dxr * col_dot[j];
  }
  double sum_dyt = 0.0, sum_dyb = 0.0, dot_dyt = 0.0, dot_dyb = 0.0;
  for (int i = 0; i < H; ++i) {
    const double y = image.pixel_y(i);
    const double st = sigmoid(mask.k * (y - mask.y_t));
    const double sb = sigmoid(mask.k * (y - mask.y_b));
    const double dyt = -mask.k * st * (1.0 - st);
    const double dyb = mask.k * sb * (1.0 - sb);
    sum_dyt += dyt;
    sum_dyb += dyb;
    dot_dyt += dyt * row_dot[i];
    dot_dyb += dyb * row_dot[i];
  }

  d_mask.x_l += (dot_dxl - p_dot * fwd.sum_y * sum_dxl) / fwd.mass;
  d_mask.x_r += (dot_dxr - p_dot * fwd.sum_y * sum_dxr) / fwd.mass;
  d_mask.y_t += (dot_dyt - p_dot * fwd.sum_x * sum_dyt) / fwd.mass;
  d_mask.y_b += (dot_dyb - p_dot * fwd.sum_x * sum_dyb) / fwd.mass;
}

}  // namespace vise::ranking
