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
 * Classical comparison model: a fully connected input -> hidden -> input
 * autoencoder with a ReLU after each dense layer, scored per patch by the
 * cosine similarity between the patch and its reconstruction. Map assembly,
 * cost and optimizer are the ones the quantum model uses.
 */

#pragma once

#include <random>
#include <span>
#include <vector>

#include "qpbae/image.hpp"
#include "qpbae/patchflow.hpp"
#include "qpbae/train.hpp"

namespace qpbae {

class DenseAutoencoder {
 public:
  /// Zero weights and biases.
  DenseAutoencoder(int input_dim = 64, int hidden_dim = 4);
  DenseAutoencoder(int input_dim, int hidden_dim, std::vector<double> params);

  /// Weights and biases uniform in [-sqrt(1/fan_in), +sqrt(1/fan_in)].
  static DenseAutoencoder random(int input_dim, int hidden_dim, std::mt19937_64& rng);

  int input_dim() const noexcept { return input_dim_; }
  int hidden_dim() const noexcept { return hidden_dim_; }

  /// (in * hidden + hidden) + (hidden * in + in).
  static std::size_t parameter_count(int input_dim, int hidden_dim);
  std::size_t parameter_count() const { return params_.size(); }

  /// Flat layout: W1 (hidden x in, row-major), b1 (hidden), W2 (in x hidden),
  /// b2 (in).
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }

  std::vector<double> forward(std::span<const double> patch) const;

 private:
  int input_dim_;
  int hidden_dim_;
  std::vector<double> params_;
};

/// x . y / (|x| |y|); 0 when either vector is zero.
double cosine_similarity(std::span<const double> x, std::span<const double> y);

/// Cosine score of one patch and d(score)/d(params) accumulated as
/// grad += scale * dscore.
double cosine_score_backprop(const DenseAutoencoder& model, std::span<const double> patch,
                             double scale, std::span<double> grad);

double baseline_image_cost(const Image& img, const DenseAutoencoder& model, int patch_size,
                           int stride);
double baseline_cost_and_gradient(const Image& img, const DenseAutoencoder& model,
                                  int patch_size, int stride, std::span<double> grad);

PatchScorer classical_scorer(const DenseAutoencoder& model);

/// Anomaly map Y = 1 - Z from cosine scores.
ScoreMap baseline_infer_map(const Image& img, const DenseAutoencoder& model, int patch_size,
                            int stride);

/// Same Adam loop as the quantum model; the hidden width defaults to 4
/// (64 -> 4 matches the 93.75% compression of P = 8, BD = 2).
TrainState train_baseline(std::span<const Image> train, std::span<const Image> val,
                          const TrainConfig& tcfg, int patch_size, int stride,
                          int hidden_dim = 4);

}  // namespace qpbae
