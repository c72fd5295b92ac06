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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vise/binary_code.hpp"
#include "vise/distance.hpp"
#include "vise/embedding.hpp"
#include "vise/ranked_list.hpp"
#include "vise/rng.hpp"

using namespace vise;

TEST_CASE("l2_distance identity and antipodal unit vectors") {
  std::vector<float> e1(8, 0.0f);
  e1[0] = 1.0f;
  std::vector<float> neg = e1;
  neg[0] = -1.0f;
  const auto a = Embedding::make(e1, true);
  const auto b = Embedding::make(neg, true);
  CHECK(l2_distance(a, a) == doctest::Approx(0.0));
  CHECK(l2_distance(a, b) == doctest::Approx(2.0));
  CHECK(l2_distance(a, b) == l2_distance(b, a));
}

TEST_CASE("l2_distance matches element-wise oracle on random 512-d pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::random_unit(rng, 512);
    const auto b = testing::random_unit(rng, 512);
    const double expect = testing::naive_l2(a.span(), b.span());
    CHECK(std::fabs(l2_distance(a, b) - expect) < 1e-12);
  }
}

TEST_CASE("l2_distance rejects dimension mismatch") {
  const auto a = Embedding::make({1.0f, 0.0f});
  const auto b = Embedding::make({1.0f, 0.0f, 0.0f});
  CHECK_THROWS_AS((void)l2_distance(a, b), DimensionError);
}

TEST_CASE("hamming on small known codes") {
  BinaryCode a = BinaryCode::zeros(4);
  BinaryCode b = BinaryCode::zeros(4);
  a.words[0] = 0b1010;
  b.words[0] = 0b0011;
  CHECK(hamming(a, b) == 2);
  CHECK(hamming(a, a) == 0);
  CHECK(hamming(b, a) == 2);
}

TEST_CASE("hamming equals bit-by-bit oracle on random 256-bit codes") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testing::random_code(rng, 256);
    const auto b = testing::random_code(rng, 256);
    CHECK(hamming(a, b) == testing::naive_hamming(a, b));
  }
}

TEST_CASE("hamming rejects length mismatch") {
  CHECK_THROWS_AS((void)hamming(BinaryCode::zeros(64), BinaryCode::zeros(128)),
                  DimensionError);
}

TEST_CASE("hamming satisfies the triangle inequality") {
  Rng rng(13);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = testing::random_code(rng, 128);
    const auto b = testing::random_code(rng, 128);
    const auto c = testing::random_code(rng, 128);
    CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c));
  }
}

TEST_CASE("binarize uses strict greater-than per dimension") {
  const auto code =
      binarize(Embedding::make({0.5f, -0.5f}), std::vector<float>{0.0f, 0.0f});
  CHECK(code.length_bits == 2);
  CHECK(code.get_bit(0));        // bit order: index 0 = least significant
  CHECK_FALSE(code.get_bit(1));
  CHECK(code.words[0] == 0b01);

  const std::vector<float> t{0.25f, -1.5f, 3.0f};
  const auto zero = binarize(Embedding::make({0.25f, -1.5f, 3.0f}), t);
  for (uint32_t i = 0; i < 3; ++i) CHECK_FALSE(zero.get_bit(i));
}

TEST_CASE("binarize rejects non-finite values") {
  std::vector<float> v{1.0f, std::numeric_limits<float>::quiet_NaN()};
  const std::vector<float> t{0.0f, 0.0f};
  CHECK_THROWS_AS((void)binarize({v.data(), v.size()}, {t.data(), t.size()}),
                  InvalidValueError);
}

TEST_CASE("binarize with median thresholds balances bits") {
  Rng rng(17);
  const size_t n = 1000, dim = 32;
  std::vector<std::vector<float>> batch;
  for (size_t i = 0; i < n; ++i) {
    std::vector<float> v(dim);
    for (float& x : v) x = static_cast<float>(rng.next_normal());
    batch.push_back(std::move(v));
  }
  // Median oracle per dimension, independent of the index build path.
  std::vector<float> thresholds(dim);
  for (size_t d = 0; d < dim; ++d) {
    std::vector<float> column(n);
    for (size_t i = 0; i < n; ++i) column[i] = batch[i][d];
    std::sort(column.begin(), column.end());
    thresholds[d] = column[(n - 1) / 2];
  }
  std::vector<size_t> ones(dim, 0);
  for (const auto& v : batch) {
    const auto code = binarize({v.data(), v.size()}, thresholds);
    for (size_t d = 0; d < dim; ++d) {
      if (code.get_bit(static_cast<uint32_t>(d))) ++ones[d];
    }
  }
  for (size_t d = 0; d < dim; ++d) {
    const double frac = double(ones[d]) / double(n);
    CHECK(frac >= 0.4);
    CHECK(frac <= 0.6);
  }
}

TEST_CASE("equal embeddings produce equal codes") {
  Rng rng(19);
  const auto e = testing::random_unit(rng, 64);
  std::vector<float> thresholds(64);
  for (float& t : thresholds) t = static_cast<float>(rng.next_normal() * 0.1);
  CHECK(binarize(e, thresholds) == binarize(e, thresholds));
}

TEST_CASE("ranked list ordering is total and deterministic") {
  Rng rng(23);
  RankedList a;
  for (int i = 0; i < 200; ++i) {
    // Duplicated distances force the id tie-break.
    a.entries.push_back(
        RankedEntry{rng.next_u64() % 1000, double(rng.next_below(8)), {}});
  }
  // De-duplicate ids, as the invariant requires.
  std::sort(a.entries.begin(), a.entries.end(),
            [](auto& x, auto& y) { return x.id < y.id; });
  a.entries.erase(std::unique(a.entries.begin(), a.entries.end(),
                              [](auto& x, auto& y) { return x.id == y.id; }),
                  a.entries.end());

  RankedList b = a;
  std::reverse(b.entries.begin(), b.entries.end());
  a.sort_by_distance();
  a.sort_by_distance();
  b.sort_by_distance();
  CHECK(a.to_bytes() == b.to_bytes());
  CHECK(a.is_sorted_by_distance());
}

TEST_CASE("embedding invariant checks") {
  CHECK_THROWS_AS((void)Embedding::make({1.0f, 1.0f}, true), InvalidValueError);
  CHECK_THROWS_AS(
      (void)Embedding::make({std::numeric_limits<float>::infinity()}),
      InvalidValueError);
  const auto unit = Embedding::make_unit({3.0f, 4.0f});
  CHECK(unit.normalized);
  CHECK(unit.values[0] == doctest::Approx(0.6f));
  CHECK_THROWS_AS((void)Embedding::make_unit({0.0f, 0.0f}), InvalidValueError);
}

TEST_CASE("quality metadata range validation") {
  QualityMeta ok{10, 0.5f, 1.0f};
  CHECK_NOTHROW(ok.validate());
  QualityMeta bad{10, 1.5f, 0.0f};
  CHECK_THROWS_AS(bad.validate(), InvalidValueError);
}
