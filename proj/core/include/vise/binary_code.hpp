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

#ifndef VISE_BINARY_CODE_HPP_
#define VISE_BINARY_CODE_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vise/embedding.hpp"
#include "vise/errors.hpp"

namespace vise {

// Packed bit string. Bit i lives in word i/64 at position i%64 (bit 0 is the
// least significant bit of word 0). Pad bits past `length_bits` stay zero.
struct BinaryCode {
  uint32_t length_bits = 0;
  std::vector<uint64_t> words;

  static size_t words_for(uint32_t bits) { return (bits + 63u) / 64u; }

  static BinaryCode zeros(uint32_t bits) {
    return BinaryCode{bits, std::vector<uint64_t>(words_for(bits), 0)};
  }

  bool get_bit(uint32_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }

  void set_bit(uint32_t i, bool v) {
    const uint64_t mask = 1ULL << (i % 64);
    if (v) {
      words[i / 64] |= mask;
    } else {
      words[i / 64] &= ~mask;
    }
  }

  bool operator==(const BinaryCode& other) const = default;
};

// Thresholding quantizer: bit i = 1 iff e[i] > thresholds[i] (strict).
// Thresholds default to per-dimension inventory medians at index build time.
inline BinaryCode binarize(std::span<const float> values,
                           std::span<const float> thresholds) {
  if (values.size() != thresholds.size()) {
    throw DimensionError("binarize: thresholds length != embedding dimension");
  }
  BinaryCode code = BinaryCode::zeros(static_cast<uint32_t>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidValueError("binarize: non-finite input value");
    }
    if (values[i] > thresholds[i]) code.words[i / 64] |= 1ULL << (i % 64);
  }
  return code;
}

inline BinaryCode binarize(const Embedding& e,
                           std::span<const float> thresholds) {
  return binarize(e.span(), thresholds);
}

}  // namespace vise

#endif  // VISE_BINARY_CODE_HPP_
