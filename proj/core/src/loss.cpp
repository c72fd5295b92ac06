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

#include "vise/ranking/loss.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vise/errors.hpp"

namespace vise::ranking {

namespace {

double l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("triplet_loss: dim mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double triplet_loss(std::span<const double> fq, std::span<const double> fqp,
                    std::span<const double> fqn, double delta) {
  if (delta < 0.0) throw InvalidParamError("triplet_loss: delta must be >= 0");
  return std::max(0.0, l2(fq, fqp) - l2(fq, fqn) + delta);
}

double triplet_loss(const Embedding& fq, const Embedding& fqp,
                    const Embedding& fqn, double delta) {
  auto widen = [](const Embedding& e) {
    return std::vector<double>(e.values.begin(), e.values.end());
  };
  const auto q = widen(fq), p = widen(fqp), n = widen(fqn);
  return triplet_loss(std::span<const double>(q), std::span<const double>(p),
                      std::span<const double>(n), delta);
}

BatchLossDetail batch_loss_detail(std::span<const EmbeddedTriplet> triplets,
                                  double delta) {
  BatchLossDetail detail;
  detail.coefficients.assign(triplets.size(), 0.0);

  std::vector<double> terms(triplets.size(), 0.0);
  std::map<uint64_t, std::vector<size_t>> violating_by_query;
  for (size_t t = 0; t < triplets.size(); ++t) {
    terms[t] = triplet_loss(triplets[t].f_query, triplets[t].f_positive,
                            triplets[t].f_negative, delta);
    if (terms[t] > 0.0) violating_by_query[triplets[t].query_key].push_back(t);
  }

  detail.active_queries = violating_by_query.size();
  if (detail.active_queries == 0) return detail;

  const double outer = 1.0 / static_cast<double>(detail.active_queries);
  for (const auto& [key, indices] : violating_by_query) {
    const double inner = 1.0 / static_cast<double>(indices.size());
    detail.violating_terms += indices.size();
    for (size_t t : indices) {
      detail.coefficients[t] = outer * inner;
      detail.loss += outer * inner * terms[t];
    }
  }
  return detail;
}

double batch_loss(std::span<const EmbeddedTriplet> triplets, double delta) {
  return batch_loss_detail(triplets, delta).loss;
}

}  // namespace vise::ranking
