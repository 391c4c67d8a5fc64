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
 * MPS staircase encoder, its adjoint, and the two SWAP-test circuits built
 * on top of it (trash-vs-reference for training, input-vs-reconstruction
 * for scoring).
 *
 * Register split of the n data qubits: the first n_BD qubits carry the
 * compressed state, the last n_t = n - n_BD are trash. The reference
 * register is |0...0> on n_t qubits.
 */

#pragma once

#include <random>
#include <span>
#include <vector>

#include "qpbae/statevec.hpp"

namespace qpbae {

/// One two-qubit block of the staircase: RY on both qubits, then
/// CNOT(first -> second).
struct MpsBlock {
  int first;
  int second;
  int theta_first;   // parameter index for the RY on `first`
  int theta_second;  // parameter index for the RY on `second`

  friend bool operator==(const MpsBlock&, const MpsBlock&) = default;
};

/// Block j acts on (j, j+1) with parameters (2j, 2j+1), j = 0..n-2.
std::vector<MpsBlock> mps_block_layout(int n_data_qubits);

/// 2 (n - 1) trainable angles for an n-qubit patch register.
int mps_parameter_count(int n_data_qubits);

class MpsParams {
 public:
  MpsParams() = default;
  MpsParams(int n_data_qubits, std::vector<double> angles);

  static MpsParams zeros(int n_data_qubits);
  /// Angles drawn uniformly from [0, 2 pi).
  static MpsParams random(int n_data_qubits, std::mt19937_64& rng);

  int n_data_qubits() const noexcept { return n_data_qubits_; }
  std::size_t size() const noexcept { return angles_.size(); }
  std::span<const double> angles() const noexcept { return angles_; }
  std::span<double> angles() noexcept { return angles_; }
  double operator[](std::size_t k) const { return angles_[k]; }

  friend bool operator==(const MpsParams&, const MpsParams&) = default;

 private:
  int n_data_qubits_ = 0;
  std::vector<double> angles_;
};

struct AutoencoderConfig {
  int patch_size = 4;
  int bottleneck_dim = 2;
  // Discard the trash register (replace it with the reference |0...0>)
  // between encoder and decoder in the scoring circuit. Without the reset the
  // decoder undoes the encoder exactly and every score is 1.
  bool reset_trash_before_decode = true;
  // All-zero patches embed as the uniform state by default; with this set
  // they skip the circuit and score 1 (no anomaly) instead.
  bool zero_patch_scores_one = false;
  int max_qubits = kMaxQubits;

  /// Validates P^2 = 2^n and 1 <= BD < n (BD == n is accepted as the
  /// uncompressed limiting case).
  static AutoencoderConfig make(int patch_size, int bottleneck_dim);

  int n_data_qubits() const;
  int n_trash() const { return n_data_qubits() - bottleneck_dim; }
  /// (1 - 2^BD / P^2) * 100. Every value on the supported grid is a dyadic
  /// rational, so the result is exact.
  double compression_percent() const;
};

/// Encoder U(theta) on qubits [offset, offset + n).
void apply_encoder(StateVector& state, std::span<const double> angles, int n_data_qubits,
                   int offset = 0);
/// Exact adjoint U(theta)^dagger on qubits [offset, offset + n).
void apply_decoder(StateVector& state, std::span<const double> angles, int n_data_qubits,
                   int offset = 0);

StateVector apply_encoder(StateVector state, const MpsParams& params, int offset = 0);
StateVector apply_decoder(StateVector state, const MpsParams& params, int offset = 0);

/// Training score: SWAP test between the trash qubits after encoding and a
/// fresh |0...0> reference. Returns <Z> on the ancilla.
double training_fidelity(const StateVector& patch_state, std::span<const double> angles,
                         const AutoencoderConfig& cfg);
double training_fidelity(const StateVector& patch_state, const MpsParams& params,
                         const AutoencoderConfig& cfg);

/// Scoring circuit: encode, (optionally) reset the trash register, decode,
/// then SWAP-test the result against a fresh copy of the input. Returns
/// P(ancilla = 0) in [0.5, 1].
///
/// The encoder and decoder take separate angle vectors so that derivatives
/// can be taken per gate occurrence; the public overloads pass the same
/// vector to both.
double test_similarity(const StateVector& patch_state, std::span<const double> encoder_angles,
                       std::span<const double> decoder_angles, const AutoencoderConfig& cfg);
double test_similarity(const StateVector& patch_state, const MpsParams& params,
                       const AutoencoderConfig& cfg);

/// Shot-sampled scoring circuit (binomial draw on the ancilla).
double test_similarity_sampled(const StateVector& patch_state, const MpsParams& params,
                               const AutoencoderConfig& cfg, int shots, std::mt19937_64& rng);

/// d(test_similarity)/d(theta_k) by the parameter-shift rule applied to each
/// gate occurrence (encoder and decoder) and summed.
std::vector<double> test_similarity_gradient(const StateVector& patch_state,
                                             const MpsParams& params,
                                             const AutoencoderConfig& cfg);

}  // namespace qpbae
