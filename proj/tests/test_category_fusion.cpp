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
#include <vector>

#include "oracles.hpp"
#include "vise/fusion/category_fusion.hpp"
#include "vise/rng.hpp"

using namespace vise;
using namespace vise::fusion;

namespace {

Embedding unit2(float x, float y) {
  return Embedding::make_unit({x, y});
}

// 2-class Gaussian fixture in a low-dimensional space.
struct GaussianFixture {
  std::vector<ReferencePair> reference;
  std::vector<ValidationPoint> validation;
};

GaussianFixture make_gaussian_fixture(uint64_t seed, size_t reference_n,
                                      size_t validation_n, double separation) {
  Rng rng(seed);
  GaussianFixture fx;
  const size_t dim = 8;
  auto sample = [&](int label) {
    std::vector<float> v(dim);
    for (size_t d = 0; d < dim; ++d) {
      v[d] = static_cast<float>(rng.next_normal());
    }
    v[0] += static_cast<float>(label == 0 ? -separation : separation);
    return Embedding::make_unit(std::move(v));
  };
  for (size_t i = 0; i < reference_n; ++i) {
    const int label = static_cast<int>(i % 2);
    fx.reference.push_back({sample(label), label});
  }
  for (size_t i = 0; i < validation_n; ++i) {
    const int label = static_cast<int>(i % 2);
    fx.validation.push_back({sample(label), label});
  }
  return fx;
}

}  // namespace

TEST_CASE("knn_weight matches the closed form") {
  const auto x = unit2(1.0f, 0.0f);
  CHECK(knn_weight(x, x, 3.0) == doctest::Approx(1.0));
  CHECK(knn_weight_from_distance(1.0, 1.0) == doctest::Approx(0.367879441));
  CHECK(knn_weight_from_distance(0.5, 2.0) == doctest::Approx(0.606530660));
  CHECK_THROWS_AS((void)knn_weight_from_distance(1.0, 0.0), InvalidParamError);
  CHECK_THROWS_AS((void)knn_weight_from_distance(1.0, -2.0), InvalidParamError);
}

TEST_CASE("search_based_scores on unanimous and symmetric votes") {
  WeightParams params{1.0, 30};
  std::vector<NeighborHit> unanimous(30, NeighborHit{5, 0.3});
  const auto d1 = search_based_scores(unanimous, params);
  CHECK(d1.probs[5] == doctest::Approx(1.0));
  CHECK(d1.argmax() == 5);

  std::vector<NeighborHit> pair{{2, 0.4}, {9, 0.4}};
  const auto d2 = search_based_scores(pair, params);
  CHECK(d2.probs[2] == doctest::Approx(0.5));
  CHECK(d2.probs[9] == doctest::Approx(0.5));

  CHECK_THROWS_AS((void)search_based_scores({}, params), EmptyInputError);
}

TEST_CASE("search_based_scores equals hand-summed weights") {
  WeightParams params{1.0, 30};
  const std::vector<NeighborHit> neighbors{
      {0, 0.1}, {0, 0.2}, {1, 0.3}, {1, 0.4}, {1, 0.5}};
  const auto dist = search_based_scores(neighbors, params);
  double wa = std::exp(-0.01) + std::exp(-0.04);
  double wb = std::exp(-0.09) + std::exp(-0.16) + std::exp(-0.25);
  CHECK(dist.probs[0] == doctest::Approx(wa / (wa + wb)).epsilon(1e-12));
  CHECK(dist.probs[1] == doctest::Approx(wb / (wa + wb)).epsilon(1e-12));
}

TEST_CASE("search_based_scores invariant to uniform weight rescaling") {
  // Scaling every weight by a constant is adding a constant to each squared
  // distance; the normalized vote must not change.
  WeightParams params{2.0, 10};
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<NeighborHit> base;
    for (int i = 0; i < 10; ++i) {
      base.push_back({static_cast<int>(rng.next_below(kNumCategories)),
                      rng.next_double(0.05, 1.2)});
    }
    const double shift = 0.37;  // d'^2 = d^2 + shift
    std::vector<NeighborHit> shifted = base;
    for (auto& n : shifted) {
      n.distance = std::sqrt(n.distance * n.distance + shift);
    }
    const auto a = search_based_scores(base, params);
    const auto b = search_based_scores(shifted, params);
    for (int c = 0; c < kNumCategories; ++c) {
      CHECK(a.probs[c] == doctest::Approx(b.probs[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("estimate_lambda returns the lower bound on a flat likelihood") {
  // Unanimous-correct neighborhoods: Pr(true label) == 1 for every lambda.
  std::vector<ValidationPoint> validation;
  std::vector<ReferencePair> reference;
  Rng rng(37);
  for (int i = 0; i < 6; ++i) {
    const int label = i % 2;
    const auto e = testing::random_unit(rng, 8);
    reference.push_back({e, label});
  }
  for (int i = 0; i < 4; ++i) {
    // One-neighbor queries: k = 1 keeps each neighborhood unanimous.
    validation.push_back({reference[size_t(i)].x, reference[size_t(i)].label});
  }
  const double lambda = estimate_lambda(validation, reference, 1);
  CHECK(lambda == doctest::Approx(1e-3));
}

TEST_CASE("estimate_lambda hits the upper bound on a monotone likelihood") {
  // One correct neighbor at 0.1 and one wrong at 0.9: the correct class
  // mass grows with lambda, so the optimum is the upper search bound.
  std::vector<ReferencePair> reference{{unit2(1.0f, 0.0f), 3},
                                       {unit2(0.0f, 1.0f), 7}};
  // Validation point placed so distances are ~0.1 and ~0.9.
  const float t = 0.1f;
  std::vector<float> v{1.0f - t * t / 2.0f,
                       std::sqrt(1.0f - (1.0f - t * t / 2.0f) *
                                            (1.0f - t * t / 2.0f))};
  std::vector<ValidationPoint> validation{{Embedding::make_unit(v), 3}};
  const double lambda = estimate_lambda(validation, reference, 2);
  CHECK(lambda == doctest::Approx(1e3));
}

TEST_CASE("estimate_lambda flags validation points with unreachable labels") {
  std::vector<ReferencePair> reference{{unit2(1.0f, 0.0f), 0},
                                       {unit2(0.0f, 1.0f), 0}};
  std::vector<ValidationPoint> validation{{unit2(1.0f, 0.0f), 5}};
  CHECK_THROWS_AS((void)estimate_lambda(validation, reference, 2),
                  DegenerateLikelihoodError);
}

TEST_CASE("estimate_lambda lands within 10% of a dense grid oracle") {
  for (uint64_t seed : {101u, 202u, 303u}) {
    const auto fx = make_gaussian_fixture(seed, 160, 60, 0.9);
    const int k = 15;
    const double fitted = estimate_lambda(fx.validation, fx.reference, k);

    // 200-point log-spaced dense grid over the same likelihood.
    double best_lambda = 1e-3, best_ll = -1e300;
    for (int i = 0; i < 200; ++i) {
      const double lam =
          std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * i / 199.0);
      const double ll = label_log_likelihood(fx.validation, fx.reference, k, lam);
      if (ll > best_ll) {
        best_ll = ll;
        best_lambda = lam;
      }
    }
    if (best_lambda <= 1.001e-3 || best_lambda >= 0.999e3) {
      // Degenerate fixture (optimum at an edge); both paths must agree.
      CHECK(std::fabs(fitted - best_lambda) / best_lambda < 0.1);
    } else {
      CHECK(std::fabs(fitted - best_lambda) / best_lambda < 0.1);
    }
  }
}

TEST_CASE("fuse honors degenerate weights and flips the argmax") {
  std::array<double, kNumCategories> m{}, s{};
  m[0] = 0.6;
  m[1] = 0.4;
  s[0] = 0.2;
  s[1] = 0.8;
  const auto model = CategoryDistribution::normalized(m);
  const auto search = CategoryDistribution::normalized(s);

  const auto at1 = fuse(model, search, 1.0);
  const auto at0 = fuse(model, search, 0.0);
  for (int c = 0; c < kNumCategories; ++c) {
    CHECK(at1.probs[c] == doctest::Approx(model.probs[c]));
    CHECK(at0.probs[c] == doctest::Approx(search.probs[c]));
  }

  const auto mid = fuse(model, search, 0.5);
  CHECK(mid.probs[0] == doctest::Approx(0.4));
  CHECK(mid.probs[1] == doctest::Approx(0.6));
  CHECK(model.argmax() == 0);
  CHECK(mid.argmax() == 1);

  CHECK_THROWS_AS((void)fuse(model, search, 1.5), InvalidParamError);
  CHECK_THROWS_AS((void)fuse(model, search, -0.1), InvalidParamError);
}

TEST_CASE("fuse argmax equals the endpoint argmax at degenerate alphas") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, kNumCategories> m{}, s{};
    for (int c = 0; c < kNumCategories; ++c) {
      m[c] = rng.next_double() + 1e-6;
      s[c] = rng.next_double() + 1e-6;
    }
    const auto model = CategoryDistribution::normalized(m);
    const auto search = CategoryDistribution::normalized(s);
    CHECK(fuse(model, search, 1.0).argmax() == model.argmax());
    CHECK(fuse(model, search, 0.0).argmax() == search.argmax());
  }
}

TEST_CASE("tune_alpha tie-breaking and dominance") {
  const auto right = CategoryDistribution::point_mass(1);
  const auto wrong = CategoryDistribution::point_mass(2);
  std::vector<int> labels(10, 1);

  SUBCASE("model always right, search always right: smallest alpha wins") {
    std::vector<CategoryDistribution> model(10, right), search(10, right);
    const auto r = tune_alpha(model, search, labels);
    CHECK(r.alpha == doctest::Approx(0.0));
    CHECK(r.accuracy == doctest::Approx(1.0));
  }

  SUBCASE("search right, model wrong: alpha = 0") {
    std::vector<CategoryDistribution> model(10, wrong), search(10, right);
    const auto r = tune_alpha(model, search, labels);
    CHECK(r.alpha == doctest::Approx(0.0));
    CHECK(r.accuracy == doctest::Approx(1.0));
    CHECK(r.model_accuracy == doctest::Approx(0.0));
  }

  SUBCASE("model right, search wrong: smallest maximizing alpha") {
    std::vector<CategoryDistribution> model(10, right), search(10, wrong);
    const auto r = tune_alpha(model, search, labels);
    // Point masses tie at alpha = 0.5 (argmax tie -> smaller index wins,
    // category 1 < 2), so 0.5 is already the smallest maximizer.
    CHECK(r.accuracy == doctest::Approx(1.0));
    CHECK(r.alpha == doctest::Approx(0.5));
  }
}

TEST_CASE("tuned fusion beats both endpoints on disjoint error sets") {
  // Model errs on the first 3 points, search errs on the last 3; both are
  // weakly wrong / strongly right so a mid alpha fixes everything.
  std::vector<CategoryDistribution> model, search;
  std::vector<int> labels;
  auto weak = [](int wrong_cat, int true_cat) {
    std::array<double, kNumCategories> p{};
    p.fill(0.01);
    p[wrong_cat] = 0.35;
    p[true_cat] = 0.30;
    return CategoryDistribution::normalized(p);
  };
  auto strong = [](int true_cat) {
    std::array<double, kNumCategories> p{};
    p.fill(0.01);
    p[true_cat] = 0.9;
    return CategoryDistribution::normalized(p);
  };
  for (int i = 0; i < 12; ++i) {
    const int truth = i % kNumCategories;
    const int other = (truth + 1) % kNumCategories;
    labels.push_back(truth);
    if (i < 3) {
      model.push_back(weak(other, truth));
      search.push_back(strong(truth));
    } else if (i >= 9) {
      model.push_back(strong(truth));
      search.push_back(weak(other, truth));
    } else {
      model.push_back(strong(truth));
      search.push_back(strong(truth));
    }
  }
  const auto r = tune_alpha(model, search, labels);
  CHECK(r.accuracy >= r.model_accuracy);
  CHECK(r.accuracy >= r.search_accuracy);
  CHECK(r.accuracy == doctest::Approx(1.0));
  CHECK(r.model_accuracy == doctest::Approx(0.75));
  CHECK(r.search_accuracy == doctest::Approx(0.75));

  // Exhaustive oracle over the same grid.
  double best = 0.0;
  for (int g = 0; g <= 20; ++g) {
    const double alpha = 0.05 * g;
    size_t hits = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (fuse(model[i], search[i], alpha).argmax() == labels[i]) ++hits;
    }
    best = std::max(best, double(hits) / double(labels.size()));
  }
  CHECK(r.accuracy == doctest::Approx(best));
}
