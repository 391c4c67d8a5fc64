// Copyright 2026 The qpbae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Image-level cost, parameter-shift gradients and the minibatch Adam loop.
 *
 * The cost of one image is 1 minus the mean, over covered pixels, of the
 * overlap-averaged map of per-patch training scores. Per-patch training
 * scores are clamped to [0, 1].
 */

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qpbae/ansatz.hpp"
#include "qpbae/image.hpp"
#include "qpbae/patchflow.hpp"

namespace qpbae {

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.005;
  int batch_size = 4;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const TrainConfig& cfg);

struct LossRecord {
  int epoch;          // 0 = before any update
  double train_loss;  // mean image cost seen during the epoch
  double val_loss;    // mean validation cost after the epoch; NaN without validation data
};

struct TrainState {
  std::vector<double> params;
  AdamState adam;
  std::vector<LossRecord> history;
  std::vector<double> best_params;
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
  int best_epoch = 0;
  int epochs_done = 0;
};

/// Cost of one image at `params`.
using ImageCostFn = std::function<double(const Image&, std::span<const double> params)>;
/// Cost of one image; writes dCost/dparams into `grad`.
using ImageCostGradFn =
    std::function<double(const Image&, std::span<const double> params, std::span<double> grad)>;

/// Deterministic Fisher-Yates shuffle driven only by `rng`.
void seeded_shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng);

/// Epochs x minibatches of Adam on the mean batch cost. `rng` drives the
/// per-epoch data order. The best-validation parameters are tracked.
TrainState fit_params(std::vector<double> init, std::span<const Image> train,
                      std::span<const Image> val, const TrainConfig& tcfg,
                      const ImageCostFn& cost, const ImageCostGradFn& cost_grad,
                      std::mt19937_64& rng);

/// Mean cost over a set of images.
double mean_cost(std::span<const Image> images, std::span<const double> params,
                 const ImageCostFn& cost);

// --- quantum model -------------------------------------------------------

/// Per-patch training score: training_fidelity clamped to [0, 1].
double patch_training_score(std::span<const double> patch, std::span<const double> angles,
                            const AutoencoderConfig& acfg);

/// 1 - mean over covered pixels of the training-score map.
double image_cost(const Image& img, const MpsParams& params, const AutoencoderConfig& acfg,
                  int patch_size, int stride);
double image_cost(const Image& img, std::span<const double> angles,
                  const AutoencoderConfig& acfg, int patch_size, int stride);

/// dCost/dtheta via the parameter-shift rule on every patch circuit.
std::vector<double> gradient(const Image& img, const MpsParams& params,
                             const AutoencoderConfig& acfg, int patch_size, int stride);
double image_cost_and_gradient(const Image& img, std::span<const double> angles,
                               const AutoencoderConfig& acfg, int patch_size, int stride,
                               std::span<double> grad);

/// Angles drawn uniformly from [0, 2 pi) with the run seed, then the Adam loop.
TrainState fit(std::span<const Image> train, std::span<const Image> val,
               const TrainConfig& tcfg, const AutoencoderConfig& acfg, int patch_size,
               int stride);

/// Scoring options at test time.
struct InferOptions {
  int shots = 0;  // 0 = exact probabilities
  std::uint64_t shot_seed = 0;
};

/// Per-patch scoring-circuit similarity as a PatchScorer.
PatchScorer quantum_scorer(const MpsParams& params, const AutoencoderConfig& acfg);

/// Anomaly map Y = 1 - Z from the scoring circuit.
ScoreMap infer_map(const Image& img, const MpsParams& params, const AutoencoderConfig& acfg,
                   int patch_size, int stride, const InferOptions& opts = {});

// --- checkpoints ---------------------------------------------------------

/// Text checkpoint. Real values are stored as C99 hex floats so a file
/// round-trips bit-exactly. Layout, one record per line:
///
///   qpbae-checkpoint 1
///   model <quantum|classical>
///   patch_size <P>
///   stride <S>
///   bottleneck <BD>
///   reset_trash_before_decode <0|1>
///   seed <u64>
///   epoch <epochs done>
///   best_epoch <e>
///   adam_step <t>
///   layout <k> <int>...          model-specific shape integers
///   params <k> <hex>...
///   best_params <k> <hex>...
///   adam_m <k> <hex>...
///   adam_v <k> <hex>...
struct Checkpoint {
  std::string model = "quantum";
  int patch_size = 0;
  int stride = 0;
  int bottleneck = 0;
  bool reset_trash_before_decode = true;
  std::uint64_t seed = 0;
  int epoch = 0;
  int best_epoch = 0;
  std::vector<int> layout;
  std::vector<double> params;
  std::vector<double> best_params;
  AdamState adam;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// epoch,train_loss,val_loss with 17 significant digits.
void write_loss_csv(const std::string& path, std::span<const LossRecord> history);

}  // namespace qpbae
