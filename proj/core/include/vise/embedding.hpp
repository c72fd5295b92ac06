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

#ifndef VISE_EMBEDDING_HPP_
#define VISE_EMBEDDING_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vise/errors.hpp"

namespace vise {

inline constexpr int kNumCategories = 14;
inline constexpr size_t kDefaultDim = 512;

// Fixed-length float vector, optionally unit-normalized. The `normalized`
// flag is a promise checked at construction: ||v||_2 == 1 within 1e-6.
struct Embedding {
  std::vector<float> values;
  bool normalized = false;

  size_t dim() const { return values.size(); }
  std::span<const float> span() const { return {values.data(), values.size()}; }

  static Embedding make(std::vector<float> v, bool normalized = false);

  // Scales to unit norm and sets the flag. Zero vectors are rejected.
  static Embedding make_unit(std::vector<float> v);
};

inline double squared_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return acc;
}

inline Embedding Embedding::make(std::vector<float> v, bool normalized) {
  for (float x : v) {
    if (!std::isfinite(x)) throw InvalidValueError("embedding value not finite");
  }
  if (normalized) {
    const double n = std::sqrt(squared_norm({v.data(), v.size()}));
    if (std::fabs(n - 1.0) > 1e-6) {
      throw InvalidValueError("embedding flagged normalized but ||v|| != 1");
    }
  }
  return Embedding{std::move(v), normalized};
}

inline Embedding Embedding::make_unit(std::vector<float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) throw InvalidValueError("embedding value not finite");
  }
  const double n = std::sqrt(squared_norm({v.data(), v.size()}));
  if (n <= 0.0) throw InvalidValueError("cannot normalize zero vector");
  for (float& x : v) x = static_cast<float>(x / n);
  return Embedding{std::move(v), true};
}

}  // namespace vise

#endif  // VISE_EMBEDDING_HPP_
