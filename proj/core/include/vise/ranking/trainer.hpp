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

#ifndef VISE_RANKING_TRAINER_HPP_
#define VISE_RANKING_TRAINER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vise/ranking/loss.hpp"
#include "vise/ranking/synthetic.hpp"
#include "vise/ranking/toy_model.hpp"

namespace vise::ranking {

struct TrainConfig {
  double learning_rate = 0.05;
  int steps = 500;
  double margin = kDefaultMargin;
  double mask_sharpness = 10.0;  // k, fixed during training
  int embed_dim = 32;
  uint64_t seed = 1;  // embedder weight init
};

// Learnable state: shared embedder weights plus one mask per pool image.
struct TrainState {
  ToyEmbedder embedder;
  std::vector<MaskParams> masks;
  uint64_t steps_done = 0;
  std::vector<double> loss_history;     // loss evaluated before each update
  uint64_t pooling_fallbacks = 0;       // degenerate-mask pooling events

  bool operator==(const TrainState&) const = default;
};

struct TrainGradients {
  std::vector<double> d_weights;   // out_dim x in_channels
  std::vector<MaskGrad> d_masks;   // one per pool image
  double loss = 0.0;
  size_t active_queries = 0;
};

TrainState init_train_state(const TripletDataset& dataset,
                            const TrainConfig& cfg);

// Full-batch analytic gradient of the query-level loss at the given state.
TrainGradients gradients(const TrainState& state, const TripletDataset& dataset,
                         const TrainConfig& cfg);

// Plain fixed-step gradient descent. Throws DivergenceError when the loss
// stops being finite; records the loss once per step.
TrainState train(const TripletDataset& dataset, const TrainConfig& cfg);

// Continue training an existing state (used by the CLI for warm starts).
void train_steps(TrainState& state, const TripletDataset& dataset,
                 const TrainConfig& cfg, int steps);

struct LocalizationReport {
  double mean_iou = 0.0;
  double frac_iou_50 = 0.0;
  double frac_iou_70 = 0.0;
  size_t evaluated = 0;
};

// Learned per-image boxes vs planted ground truth.
LocalizationReport evaluate_localization(const TrainState& state,
                                         const TripletDataset& dataset);

// Versioned little-endian checkpoint ("PLTD").
std::vector<uint8_t> serialize_train_state(const TrainState& state);
TrainState deserialize_train_state(const std::vector<uint8_t>& bytes);
void save_train_state(const TrainState& state, const std::string& path);
TrainState load_train_state(const std::string& path);

}  // namespace vise::ranking

#endif  // VISE_RANKING_TRAINER_HPP_
