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

#ifndef VISE_DISTANCE_HPP_
#define VISE_DISTANCE_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>

#include "vise/binary_code.hpp"
#include "vise/embedding.hpp"
#include "vise/errors.hpp"

namespace vise {

// ||a - b||_2 accumulated in double. In [0, 2] for unit vectors.
inline double l2_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DimensionError("l2_distance: dimension mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double l2_distance(const Embedding& a, const Embedding& b) {
  return l2_distance(a.span(), b.span());
}

inline uint32_t hamming_words(const uint64_t* a, const uint64_t* b,
                              size_t nwords) {
  uint32_t acc = 0;
  for (size_t i = 0; i < nwords; ++i) acc += std::popcount(a[i] ^ b[i]);
  return acc;
}

// Count of differing bits. Pad bits are zero on both sides by invariant,
// so whole-word XOR+popcount is exact.
inline uint32_t hamming(const BinaryCode& a, const BinaryCode& b) {
  if (a.length_bits != b.length_bits) {
    throw DimensionError("hamming: code length mismatch");
  }
  return hamming_words(a.words.data(), b.words.data(), a.words.size());
}

}  // namespace vise

#endif  // VISE_DISTANCE_HPP_
