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

#ifndef VISE_RANKING_MASK_HPP_
#define VISE_RANKING_MASK_HPP_

#include <algorithm>
#include <cmath>

#include "vise/errors.hpp"

namespace vise::ranking {

// Axis-aligned rectangle in normalized image coordinates.
struct Box {
  double x_l = 0.0;
  double x_r = 0.0;
  double y_t = 0.0;
  double y_b = 0.0;

  double area() const { return (x_r - x_l) * (y_b - y_t); }
};

// Differentiable detection rectangle: four edge coordinates plus the
// sharpness of the sigmoid edge approximation. k is a fixed hyperparameter,
// not a trained variable.
struct MaskParams {
  double x_l = 0.2;
  double x_r = 0.8;
  double y_t = 0.2;
  double y_b = 0.8;
  double k = 10.0;

  Box box() const { return {x_l, x_r, y_t, y_b}; }

  bool operator==(const MaskParams&) const = default;

  void validate() const {
    if (!(x_l < x_r) || !(y_t < y_b)) {
      throw InvalidParamError("mask: requires x_l < x_r and y_t < y_b");
    }
    if (!(k > 0.0)) throw InvalidParamError("mask: k must be > 0");
  }
};

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Smooth box indicator
//   M(x,y) = [s(k(x-x_l)) - s(k(x-x_r))] * [s(k(y-y_t)) - s(k(y-y_b))]
// which converges to the product of step functions as k grows.
inline double soft_mask(const MaskParams& m, double x, double y) {
  const double fx = sigmoid(m.k * (x - m.x_l)) - sigmoid(m.k * (x - m.x_r));
  const double fy = sigmoid(m.k * (y - m.y_t)) - sigmoid(m.k * (y - m.y_b));
  return fx * fy;
}

// Hard step-product the mask approximates; h(t) = 1 for t >= 0.
inline double step_mask(const Box& b, double x, double y) {
  const double fx = (x >= b.x_l ? 1.0 : 0.0) - (x >= b.x_r ? 1.0 : 0.0);
  const double fy = (y >= b.y_t ? 1.0 : 0.0) - (y >= b.y_b ? 1.0 : 0.0);
  return fx * fy;
}

inline double iou(const Box& a, const Box& b) {
  const double ix =
      std::max(0.0, std::min(a.x_r, b.x_r) - std::max(a.x_l, b.x_l));
  const double iy =
      std::max(0.0, std::min(a.y_b, b.y_b) - std::max(a.y_t, b.y_t));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace vise::ranking

#endif  // VISE_RANKING_MASK_HPP_
