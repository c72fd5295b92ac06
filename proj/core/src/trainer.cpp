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

#include "vise/ranking/trainer.hpp"

#include <cmath>
#include <map>

#include "vise/errors.hpp"
#include "vise/io/binary.hpp"

namespace vise::ranking {

namespace {

constexpr double kMinBoxGap = 1e-3;

// Per-image forwards plus the batch-loss bookkeeping for one full pass.
struct BatchForward {
  std::vector<MaskedForward> forwards;  // one per pool image
  BatchLossDetail detail;
  std::vector<double> terms;  // raw hinge per triplet
  bool finite = true;         // NaN terms never compare > 0, so track them
};

double l2(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

BatchForward forward_pass(const TrainState& state, const TripletDataset& dataset,
                          const TrainConfig& cfg, uint64_t* fallbacks) {
  BatchForward out;
  out.forwards.reserve(dataset.images.size());
  for (size_t i = 0; i < dataset.images.size(); ++i) {
    out.forwards.push_back(
        embed_masked_forward(dataset.images[i], state.masks[i], state.embedder));
    if (out.forwards.back().fallback && fallbacks) ++*fallbacks;
  }

  // Same set structure as batch_loss_detail, keyed by query image index.
  out.terms.assign(dataset.triplets.size(), 0.0);
  std::map<uint64_t, std::vector<size_t>> violating_by_query;
  for (size_t t = 0; t < dataset.triplets.size(); ++t) {
    const ImageTriplet& tr = dataset.triplets[t];
    const double dp =
        l2(out.forwards[tr.query].output, out.forwards[tr.positive].output);
    const double dn =
        l2(out.forwards[tr.query].output, out.forwards[tr.negative].output);
    out.terms[t] = dp - dn + cfg.margin;
    if (!std::isfinite(out.terms[t])) out.finite = false;
    if (out.terms[t] > 0.0) violating_by_query[tr.query].push_back(t);
  }
  out.detail.coefficients.assign(dataset.triplets.size(), 0.0);
  out.detail.active_queries = violating_by_query.size();
  if (out.detail.active_queries > 0) {
    const double outer = 1.0 / static_cast<double>(out.detail.active_queries);
    for (const auto& [q, indices] : violating_by_query) {
      const double inner = 1.0 / static_cast<double>(indices.size());
      out.detail.violating_terms += indices.size();
      for (size_t t : indices) {
        out.detail.coefficients[t] = outer * inner;
        out.detail.loss += outer * inner * out.terms[t];
      }
    }
  }
  return out;
}

TrainGradients backward_pass(const TrainState& state,
                             const TripletDataset& dataset,
                             const BatchForward& fwd) {
  const int out_dim = state.embedder.out_dim;
  TrainGradients grads;
  grads.d_weights.assign(state.embedder.weights.size(), 0.0);
  grads.d_masks.assign(dataset.images.size(), MaskGrad{});
  grads.loss = fwd.detail.loss;
  grads.active_queries = fwd.detail.active_queries;

  // dL/df per image, accumulated over all violating triplets.
  std::vector<std::vector<double>> df(dataset.images.size(),
                                      std::vector<double>(out_dim, 0.0));
  for (size_t t = 0; t < dataset.triplets.size(); ++t) {
    const double coeff = fwd.detail.coefficients[t];
    if (coeff == 0.0) continue;
    const ImageTriplet& tr = dataset.triplets[t];
    const auto& fq = fwd.forwards[tr.query].output;
    const auto& fp = fwd.forwards[tr.positive].output;
    const auto& fn = fwd.forwards[tr.negative].output;
    const double dp = std::max(l2(fq, fp), 1e-12);
    const double dn = std::max(l2(fq, fn), 1e-12);
    for (int o = 0; o < out_dim; ++o) {
      const double up = (fq[o] - fp[o]) / dp;
      const double un = (fq[o] - fn[o]) / dn;
      df[tr.query][o] += coeff * (up - un);
      df[tr.positive][o] -= coeff * up;
      df[tr.negative][o] += coeff * un;
    }
  }

  for (size_t i = 0; i < dataset.images.size(); ++i) {
    bool touched = false;
    for (double v : df[i]) {
      if (v != 0.0) {
        touched = true;
        break;
      }
    }
    if (!touched) continue;
    masked_backward(dataset.images[i], state.masks[i], state.embedder,
                    fwd.forwards[i], df[i], grads.d_weights, grads.d_masks[i]);
  }
  return grads;
}

// Keeps the edge ordering invariants intact after a raw gradient step.
void project_mask(MaskParams& m) {
  if (m.x_r - m.x_l < kMinBoxGap) {
    const double mid = (m.x_l + m.x_r) / 2.0;
    m.x_l = mid - kMinBoxGap / 2.0;
    m.x_r = mid + kMinBoxGap / 2.0;
  }
  if (m.y_b - m.y_t < kMinBoxGap) {
    const double mid = (m.y_t + m.y_b) / 2.0;
    m.y_t = mid - kMinBoxGap / 2.0;
    m.y_b = mid + kMinBoxGap / 2.0;
  }
}

}  // namespace

TrainState init_train_state(const TripletDataset& dataset,
                            const TrainConfig& cfg) {
  if (dataset.images.empty() || dataset.triplets.empty()) {
    throw EmptyInputError("train: dataset has no images or no triplets");
  }
  const int channels = dataset.images.front().channels;
  TrainState state;
  state.embedder = ToyEmbedder::random_init(channels, cfg.embed_dim, cfg.seed);
  // Central 60% box as the starting detection rectangle.
  MaskParams init{0.2, 0.8, 0.2, 0.8, cfg.mask_sharpness};
  state.masks.assign(dataset.images.size(), init);
  return state;
}

TrainGradients gradients(const TrainState& state, const TripletDataset& dataset,
                         const TrainConfig& cfg) {
  const BatchForward fwd = forward_pass(state, dataset, cfg, nullptr);
  return backward_pass(state, dataset, fwd);
}

void train_steps(TrainState& state, const TripletDataset& dataset,
                 const TrainConfig& cfg, int steps) {
  for (int s = 0; s < steps; ++s) {
    BatchForward fwd;
    try {
      fwd = forward_pass(state, dataset, cfg, &state.pooling_fallbacks);
    } catch (const InvalidValueError& e) {
      // Collapsed embeddings mid-run are a divergence, not caller error.
      throw DivergenceError("training diverged at step " +
                            std::to_string(state.steps_done) + ": " + e.what());
    }
    if (!fwd.finite || !std::isfinite(fwd.detail.loss)) {
      throw DivergenceError("training diverged at step " +
                            std::to_string(state.steps_done));
    }
    state.loss_history.push_back(fwd.detail.loss);
    const TrainGradients grads = backward_pass(state, dataset, fwd);
    for (size_t w = 0; w < state.embedder.weights.size(); ++w) {
      state.embedder.weights[w] -= cfg.learning_rate * grads.d_weights[w];
    }
    for (size_t i = 0; i < state.masks.size(); ++i) {
      MaskParams& m = state.masks[i];
      m.x_l -= cfg.learning_rate * grads.d_masks[i].x_l;
      m.x_r -= cfg.learning_rate * grads.d_masks[i].x_r;
      m.y_t -= cfg.learning_rate * grads.d_masks[i].y_t;
      m.y_b -= cfg.learning_rate * grads.d_masks[i].y_b;
      project_mask(m);
    }
    ++state.steps_done;
  }
}

TrainState train(const TripletDataset& dataset, const TrainConfig& cfg) {
  TrainState state = init_train_state(dataset, cfg);
  train_steps(state, dataset, cfg, cfg.steps);
  return state;
}

LocalizationReport evaluate_localization(const TrainState& state,
                                         const TripletDataset& dataset) {
  LocalizationReport report;
  double iou_sum = 0.0;
  for (size_t i = 0; i < dataset.images.size(); ++i) {
    if (!dataset.images[i].true_box) continue;
    const double v = iou(state.masks[i].box(), *dataset.images[i].true_box);
    iou_sum += v;
    if (v >= 0.5) report.frac_iou_50 += 1.0;
    if (v >= 0.7) report.frac_iou_70 += 1.0;
    ++report.evaluated;
  }
  if (report.evaluated > 0) {
    const double n = static_cast<double>(report.evaluated);
    report.mean_iou = iou_sum / n;
    report.frac_iou_50 /= n;
    report.frac_iou_70 /= n;
  }
  return report;
}

std::vector<uint8_t> serialize_train_state(const TrainState& state) {
  io::Writer w;
  w.magic("PLTD");
  w.u32(1);  // version
  w.u32(static_cast<uint32_t>(state.embedder.out_dim));
  w.u32(static_cast<uint32_t>(state.embedder.in_channels));
  w.u64(state.masks.size());
  w.u64(state.steps_done);
  w.u64(state.pooling_fallbacks);
  for (double v : state.embedder.weights) w.f64(v);
  for (const MaskParams& m : state.masks) {
    w.f64(m.x_l);
    w.f64(m.x_r);
    w.f64(m.y_t);
    w.f64(m.y_b);
    w.f64(m.k);
  }
  w.u64(state.loss_history.size());
  for (double v : state.loss_history) w.f64(v);
  return w.take();
}

TrainState deserialize_train_state(const std::vector<uint8_t>& bytes) {
  io::Reader r(bytes);
  r.expect_magic("PLTD");
  const uint32_t version = r.u32();
  if (version != 1) {
    throw CorruptIndexError("unsupported checkpoint version " +
                            std::to_string(version));
  }
  TrainState state;
  state.embedder.out_dim = static_cast<int>(r.u32());
  state.embedder.in_channels = static_cast<int>(r.u32());
  const uint64_t n_masks = r.u64();
  state.steps_done = r.u64();
  state.pooling_fallbacks = r.u64();
  state.embedder.weights.resize(size_t(state.embedder.out_dim) *
                                state.embedder.in_channels);
  for (double& v : state.embedder.weights) v = r.f64();
  state.masks.resize(n_masks);
  for (MaskParams& m : state.masks) {
    m.x_l = r.f64();
    m.x_r = r.f64();
    m.y_t = r.f64();
    m.y_b = r.f64();
    m.k = r.f64();
  }
  state.loss_history.resize(r.u64());
  for (double& v : state.loss_history) v = r.f64();
  if (r.remaining() != 0) throw CorruptIndexError("trailing checkpoint bytes");
  return state;
}

void save_train_state(const TrainState& state, const std::string& path) {
  io::write_file(path, serialize_train_state(state));
}

TrainState load_train_state(const std::string& path) {
  return deserialize_train_state(io::read_file(path));
}

}  // namespace vise::ranking
