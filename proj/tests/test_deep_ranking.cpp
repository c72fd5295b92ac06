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

#include <cmath>

#include "oracles.hpp"
#include "vise/ranking/loss.hpp"
#include "vise/ranking/mask.hpp"
#include "vise/ranking/synthetic.hpp"
#include "vise/ranking/toy_model.hpp"
#include "vise/ranking/trainer.hpp"

using namespace vise;
using namespace vise::ranking;

namespace {

ToyImage random_image(Rng& rng, int size = 16) {
  ToyImage img = ToyImage::zeros(size, size, 3);
  for (double& v : img.values) v = rng.next_double();
  return img;
}

MaskParams random_mask(Rng& rng, double k = 10.0) {
  MaskParams m;
  m.x_l = rng.next_double(0.05, 0.45);
  m.x_r = m.x_l + rng.next_double(0.2, 0.5);
  m.y_t = rng.next_double(0.05, 0.45);
  m.y_b = m.y_t + rng.next_double(0.2, 0.5);
  m.k = k;
  return m;
}

}  // namespace

TEST_CASE("soft mask saturates inside, vanishes outside, halves on an edge") {
  MaskParams m{0.1, 0.9, 0.1, 0.9, 50.0};
  CHECK(std::fabs(soft_mask(m, 0.5, 0.5) - 1.0) < 1e-6);
  CHECK(std::fabs(soft_mask(m, -0.9, 0.5)) < 1e-6);
  // Exactly on the left edge with the other edges far: sigma(0) = 0.5.
  MaskParams wide{0.1, 40.0, -40.0, 40.0, 50.0};
  CHECK(soft_mask(wide, 0.1, 0.5) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("soft mask increases monotonically toward the box center") {
  MaskParams m{0.3, 0.7, 0.2, 0.8, 25.0};
  double prev = -1.0;
  for (double x = -0.5; x <= 0.5; x += 0.01) {
    const double v = soft_mask(m, x, 0.5);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("soft mask converges to the step product away from edges") {
  // Wide sampling domain so even k = 10 (margin 20/k = 2) has interior
  // points of its big box and exterior points beyond every edge.
  for (double k : {10.0, 50.0, 200.0}) {
    MaskParams m{-4.0, 5.0, -3.5, 4.5, k};
    const double margin = 20.0 / k;
    double worst = 0.0;
    for (double x = -8.0; x <= 9.0; x += 0.13) {
      for (double y = -8.0; y <= 9.0; y += 0.13) {
        const bool clear = std::fabs(x - m.x_l) >= margin &&
                           std::fabs(x - m.x_r) >= margin &&
                           std::fabs(y - m.y_t) >= margin &&
                           std::fabs(y - m.y_b) >= margin;
        if (!clear) continue;
        const double diff =
            std::fabs(soft_mask(m, x, y) - step_mask(m.box(), x, y));
        worst = std::max(worst, diff);
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("iou geometry") {
  Box a{0.0, 1.0, 0.0, 1.0};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  Box b{2.0, 3.0, 0.0, 1.0};
  CHECK(iou(a, b) == doctest::Approx(0.0));
  Box c{0.5, 1.5, 0.0, 1.0};  // shifted by half its width
  CHECK(iou(a, c) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("triplet loss hinge values") {
  const std::vector<double> q{0.0, 0.0};
  const std::vector<double> p1{0.2, 0.0}, n1{0.5, 0.0};
  CHECK(triplet_loss(q, p1, n1, 0.1) == doctest::Approx(0.0));
  const std::vector<double> p2{0.5, 0.0}, n2{0.45, 0.0};
  CHECK(triplet_loss(q, p2, n2, 0.1) == doctest::Approx(0.15));
  CHECK(kDefaultMargin == doctest::Approx(0.1));
}

TEST_CASE("batch loss implements the query-level average") {
  auto embed = [](double x) { return std::vector<double>{x, 0.0}; };

  SUBCASE("all satisfied batches score zero") {
    std::vector<EmbeddedTriplet> triplets{
        {1, embed(0.0), embed(0.1), embed(0.9)},
        {2, embed(0.0), embed(0.2), embed(0.8)},
    };
    const auto detail = batch_loss_detail(triplets, 0.1);
    CHECK(detail.loss == doctest::Approx(0.0));
    CHECK(detail.active_queries == 0);
  }

  SUBCASE("inner average over one query's violations") {
    // Terms: (0.5 - 0.4 + 0.1) = 0.2 and (0.5 - 0.2 + 0.1) = 0.4.
    std::vector<EmbeddedTriplet> triplets{
        {1, embed(0.0), embed(0.5), embed(0.4)},
        {1, embed(0.0), embed(0.5), embed(0.2)},
    };
    CHECK(batch_loss(triplets, 0.1) == doctest::Approx(0.3));
  }

  SUBCASE("satisfied queries leave the outer set") {
    std::vector<EmbeddedTriplet> triplets{
        {1, embed(0.0), embed(0.5), embed(0.4)},  // 0.2
        {1, embed(0.0), embed(0.5), embed(0.2)},  // 0.4
        {2, embed(0.0), embed(0.1), embed(0.9)},  // satisfied
    };
    const auto detail = batch_loss_detail(triplets, 0.1);
    CHECK(detail.loss == doctest::Approx(0.3));
    CHECK(detail.active_queries == 1);
    CHECK(detail.violating_terms == 2);
  }

  SUBCASE("one negative per query reduces to the plain hinge mean") {
    std::vector<EmbeddedTriplet> triplets{
        {1, embed(0.0), embed(0.5), embed(0.4)},  // 0.2
        {2, embed(0.0), embed(0.6), embed(0.3)},  // 0.4
        {3, embed(0.0), embed(0.1), embed(0.9)},  // satisfied
    };
    // Eq-degenerate: mean over violating queries of their single term.
    CHECK(batch_loss(triplets, 0.1) == doctest::Approx(0.3));
  }

  SUBCASE("batch order permutation leaves the loss unchanged") {
    Rng rng(81);
    std::vector<EmbeddedTriplet> triplets;
    for (int i = 0; i < 12; ++i) {
      triplets.push_back({uint64_t(i % 4), embed(rng.next_double()),
                          embed(rng.next_double()), embed(rng.next_double())});
    }
    const double base = batch_loss(triplets, 0.1);
    std::reverse(triplets.begin(), triplets.end());
    CHECK(batch_loss(triplets, 0.1) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("embed_masked matches a dense reference and handles saturation") {
  Rng rng(83);
  const auto embedder = ToyEmbedder::random_init(3, 8, 7);

  SUBCASE("saturated mask equals unmasked mean pooling") {
    const auto img = random_image(rng, 12);
    MaskParams huge{-50.0, 50.0, -50.0, 50.0, 100.0};
    const auto fwd = embed_masked_forward(img, huge, embedder);
    // Oracle: plain mean pool then linear map then normalize.
    std::vector<double> mean(3, 0.0);
    for (int i = 0; i < img.height; ++i) {
      for (int j = 0; j < img.width; ++j) {
        for (int c = 0; c < 3; ++c) mean[c] += img.at(i, j, c);
      }
    }
    for (double& v : mean) v /= double(img.height) * img.width;
    for (int c = 0; c < 3; ++c) {
      CHECK(fwd.pooled[c] == doctest::Approx(mean[c]).epsilon(1e-9));
    }
    CHECK_FALSE(fwd.fallback);
  }

  SUBCASE("vanishing mask falls back to uniform pooling") {
    const auto img = random_image(rng, 12);
    // Box far outside the image with a sharp edge: negligible mass.
    MaskParams off{30.0, 30.5, 30.0, 30.5, 200.0};
    uint64_t counter = 0;
    const auto e = embed_masked(img, off, embedder, &counter);
    CHECK(counter == 1);
    CHECK(e.normalized);
  }

  SUBCASE("pooling equals the naive double loop") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto img = random_image(rng, 9);
      const auto mask = random_mask(rng, 12.0);
      const auto fwd = embed_masked_forward(img, mask, embedder);
      std::vector<double> pooled(3, 0.0);
      double mass = 0.0;
      for (int i = 0; i < img.height; ++i) {
        for (int j = 0; j < img.width; ++j) {
          const double m = soft_mask(mask, img.pixel_x(j), img.pixel_y(i));
          mass += m;
          for (int c = 0; c < 3; ++c) pooled[c] += m * img.at(i, j, c);
        }
      }
      for (int c = 0; c < 3; ++c) {
        CHECK(std::fabs(fwd.pooled[c] - pooled[c] / mass) < 1e-10);
      }
    }
  }
}

namespace {

// Builds a small random training setup; margins near the hinge kink are
// resampled so finite differences stay on one side.
struct GradCheckCase {
  TripletDataset dataset;
  TrainState state;
  TrainConfig cfg;
};

GradCheckCase make_gradcheck_case(uint64_t seed) {
  for (uint64_t attempt = 0;; ++attempt) {
    Rng rng(splitmix64(seed + attempt * 7919));
    GradCheckCase c;
    const int images = 4 + int(rng.next_below(3));
    for (int i = 0; i < images; ++i) {
      c.dataset.images.push_back(random_image(rng, 8));
      c.dataset.pattern_of_image.push_back(i % 2);
    }
    const int triplets = 3 + int(rng.next_below(4));
    for (int t = 0; t < triplets; ++t) {
      const uint32_t q = uint32_t(rng.next_below(images));
      uint32_t p = uint32_t(rng.next_below(images));
      while (p == q) p = uint32_t(rng.next_below(images));
      uint32_t n = uint32_t(rng.next_below(images));
      while (n == q || n == p) n = uint32_t(rng.next_below(images));
      c.dataset.triplets.push_back({q, p, n});
    }
    c.cfg.embed_dim = 6;
    c.cfg.mask_sharpness = 10.0;
    c.cfg.margin = 0.1;
    c.cfg.seed = seed + 1;
    c.state = init_train_state(c.dataset, c.cfg);
    for (auto& m : c.state.masks) m = random_mask(rng, c.cfg.mask_sharpness);

    // Reject configurations with any hinge term near the kink or with any
    // query whose violation set could flip under a 1e-4 nudge.
    std::vector<MaskedForward> fwd;
    for (size_t i = 0; i < c.dataset.images.size(); ++i) {
      fwd.push_back(embed_masked_forward(c.dataset.images[i], c.state.masks[i],
                                         c.state.embedder));
    }
    auto dist = [&](uint32_t a, uint32_t b) {
      double acc = 0.0;
      for (size_t o = 0; o < fwd[a].output.size(); ++o) {
        const double d = fwd[a].output[o] - fwd[b].output[o];
        acc += d * d;
      }
      return std::sqrt(acc);
    };
    bool ok = true;
    bool any_violation = false;
    for (const auto& t : c.dataset.triplets) {
      const double term =
          dist(t.query, t.positive) - dist(t.query, t.negative) + c.cfg.margin;
      if (std::fabs(term) < 5e-3) ok = false;
      if (term > 0.0) any_violation = true;
    }
    if (ok && any_violation) return c;
  }
}

double loss_at(const GradCheckCase& c, const TrainState& state) {
  std::vector<MaskedForward> fwd;
  for (size_t i = 0; i < c.dataset.images.size(); ++i) {
    fwd.push_back(embed_masked_forward(c.dataset.images[i], state.masks[i],
                                       state.embedder));
  }
  std::vector<EmbeddedTriplet> triplets;
  for (const auto& t : c.dataset.triplets) {
    triplets.push_back({t.query, fwd[t.query].output, fwd[t.positive].output,
                        fwd[t.negative].output});
  }
  return batch_loss(triplets, c.cfg.margin);
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  const double h = 1e-4;
  int checked = 0;
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    const auto c = make_gradcheck_case(seed);
    const auto grads = gradients(c.state, c.dataset, c.cfg);

    for (size_t w = 0; w < c.state.embedder.weights.size(); ++w) {
      const double fd = testing::central_difference(
          [&](double eps) {
            TrainState s = c.state;
            s.embedder.weights[w] += eps;
            return loss_at(c, s);
          },
          h);
      CHECK(testing::relative_error(grads.d_weights[w], fd) < 1e-4);
      ++checked;
    }
    for (size_t i = 0; i < c.state.masks.size(); ++i) {
      for (int coord = 0; coord < 4; ++coord) {
        const double fd = testing::central_difference(
            [&](double eps) {
              TrainState s = c.state;
              double* edges[4] = {&s.masks[i].x_l, &s.masks[i].x_r,
                                  &s.masks[i].y_t, &s.masks[i].y_b};
              *edges[coord] += eps;
              return loss_at(c, s);
            },
            h);
        const double analytic =
            coord == 0   ? grads.d_masks[i].x_l
            : coord == 1 ? grads.d_masks[i].x_r
            : coord == 2 ? grads.d_masks[i].y_t
                         : grads.d_masks[i].y_b;
        CHECK(testing::relative_error(analytic, fd) < 1e-4);
        ++checked;
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("satisfied batches produce zero gradients") {
  // Two well-separated patterns make every margin satisfied quickly; use a
  // single triplet whose negative is very far in embedding space.
  Rng rng(91);
  TripletDataset ds;
  ToyImage bright = ToyImage::zeros(8, 8, 3);
  ToyImage bright2 = ToyImage::zeros(8, 8, 3);
  ToyImage dark = ToyImage::zeros(8, 8, 3);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      bright.at(i, j, 0) = 1.0;
      bright2.at(i, j, 0) = 0.98;
      dark.at(i, j, 2) = 1.0;
    }
  }
  ds.images = {bright, bright2, dark};
  ds.pattern_of_image = {0, 0, 1};
  ds.triplets = {{0, 1, 2}};
  TrainConfig cfg;
  cfg.embed_dim = 4;
  cfg.seed = 3;
  const auto state = init_train_state(ds, cfg);
  const auto grads = gradients(state, ds, cfg);
  CHECK(grads.loss == doctest::Approx(0.0));
  for (double g : grads.d_weights) CHECK(g == 0.0);
  for (const auto& m : grads.d_masks) {
    CHECK(m.x_l == 0.0);
    CHECK(m.x_r == 0.0);
    CHECK(m.y_t == 0.0);
    CHECK(m.y_b == 0.0);
  }
}

TEST_CASE("mask edges far outside the content carry ~zero gradient") {
  const auto c = make_gradcheck_case(21);
  TrainState state = c.state;
  // Push one mask's right edge far past all pixels; the loss must become
  // insensitive to it.
  state.masks[0].x_r = 6.0;
  const auto grads = gradients(state, c.dataset, c.cfg);
  const double fd = testing::central_difference(
      [&](double eps) {
        TrainState s = state;
        s.masks[0].x_r += eps;
        return loss_at(c, s);
      },
      1e-4);
  CHECK(std::fabs(fd) < 1e-8);
  CHECK(std::fabs(grads.d_masks[0].x_r) < 1e-8);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  SyntheticConfig scfg;
  scfg.seed = 5;
  scfg.patterns = 2;
  scfg.images_per_pattern = 2;
  scfg.triplet_count = 6;
  scfg.image_size = 12;
  const auto ds = generate_triplet_dataset(scfg);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.steps = 5;
  cfg.embed_dim = 8;
  const auto state = train(ds, cfg);
  const auto init = init_train_state(ds, cfg);
  CHECK(state.embedder.weights == init.embedder.weights);
  for (size_t i = 0; i < state.masks.size(); ++i) {
    CHECK(state.masks[i].x_l == init.masks[i].x_l);
    CHECK(state.masks[i].x_r == init.masks[i].x_r);
  }
  CHECK(state.steps_done == 5);
  CHECK(state.loss_history.size() == 5);
}

TEST_CASE("short training run reduces the loss") {
  SyntheticConfig scfg;
  scfg.seed = 11;
  scfg.patterns = 4;
  scfg.images_per_pattern = 3;
  scfg.triplet_count = 36;
  scfg.image_size = 16;
  const auto ds = generate_triplet_dataset(scfg);
  TrainConfig cfg;
  cfg.steps = 120;
  cfg.embed_dim = 16;
  cfg.seed = 2;
  const auto state = train(ds, cfg);
  REQUIRE(state.loss_history.size() == 120);
  CHECK(state.loss_history.back() < state.loss_history.front());
}

TEST_CASE("divergent states raise DivergenceError") {
  // Image values are finite but extreme; the linear map overflows to inf,
  // normalization yields NaN, and the trainer reports the step.
  TripletDataset ds;
  ToyImage big = ToyImage::zeros(4, 4, 3);
  for (double& v : big.values) v = 1e308;
  ds.images = {big, big, big};
  ds.pattern_of_image = {0, 0, 1};
  ds.triplets = {{0, 1, 2}};
  TrainConfig cfg;
  cfg.steps = 1;
  CHECK_THROWS_AS((void)train(ds, cfg), DivergenceError);
}

TEST_CASE("train state checkpoints round-trip byte-identically") {
  SyntheticConfig scfg;
  scfg.seed = 13;
  scfg.patterns = 2;
  scfg.images_per_pattern = 2;
  scfg.triplet_count = 8;
  scfg.image_size = 10;
  const auto ds = generate_triplet_dataset(scfg);
  TrainConfig cfg;
  cfg.steps = 10;
  cfg.embed_dim = 6;
  const auto state = train(ds, cfg);

  const auto bytes = serialize_train_state(state);
  const auto loaded = deserialize_train_state(bytes);
  CHECK(loaded == state);
  CHECK(serialize_train_state(loaded) == bytes);
}

TEST_CASE("localization report scores learned boxes against ground truth") {
  TripletDataset ds;
  ds.images.push_back(ToyImage::zeros(8, 8, 3));
  ds.images.back().true_box = Box{0.2, 0.6, 0.2, 0.6};
  ds.images.push_back(ToyImage::zeros(8, 8, 3));
  ds.images.back().true_box = Box{0.0, 0.5, 0.0, 0.5};
  ds.pattern_of_image = {0, 1};
  ds.triplets = {{0, 1, 0}};

  TrainState state;
  state.embedder = ToyEmbedder::random_init(3, 4, 1);
  state.masks = {MaskParams{0.2, 0.6, 0.2, 0.6, 10.0},
                 MaskParams{0.5, 1.0, 0.5, 1.0, 10.0}};
  const auto report = evaluate_localization(state, ds);
  CHECK(report.evaluated == 2);
  CHECK(report.mean_iou == doctest::Approx(0.5));  // IOU 1.0 and 0.0
  CHECK(report.frac_iou_50 == doctest::Approx(0.5));
}
