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

#ifndef VISE_RANKING_LOSS_HPP_
#define VISE_RANKING_LOSS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vise/embedding.hpp"

namespace vise::ranking {

inline constexpr double kDefaultMargin = 0.1;

// Hinge ranking term: max(0, ||fq - fq+|| - ||fq - fq-|| + delta).
double triplet_loss(std::span<const double> fq, std::span<const double> fqp,
                    std::span<const double> fqn, double delta = kDefaultMargin);
double triplet_loss(const Embedding& fq, const Embedding& fqp,
                    const Embedding& fqn, double delta = kDefaultMargin);

// One embedded triplet; query_key groups triplets belonging to one query.
struct EmbeddedTriplet {
  uint64_t query_key = 0;
  std::vector<double> f_query;
  std::vector<double> f_positive;
  std::vector<double> f_negative;
};

struct BatchLossDetail {
  double loss = 0.0;
  size_t active_queries = 0;   // |Q|: queries with >= 1 violating negative
  size_t violating_terms = 0;  // sum over q of |N_q|
  // Per input triplet: 1/(|Q| |N_q|) if it violates the margin, else 0.
  // The batch loss is the coefficient-weighted sum of hinge terms.
  std::vector<double> coefficients;
};

// Query-level average: mean over violating queries of the mean violating
// hinge term within each query. Satisfied queries are excluded from the
// outer average; an all-satisfied batch scores 0.
BatchLossDetail batch_loss_detail(std::span<const EmbeddedTriplet> triplets,
                                  double delta = kDefaultMargin);

double batch_loss(std::span<const EmbeddedTriplet> triplets,
                  double delta = kDefaultMargin);

}  // namespace vise::ranking

#endif  // VISE_RANKING_LOSS_HPP_
