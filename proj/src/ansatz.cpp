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

#include "qpbae/ansatz.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "qpbae/errors.hpp"

namespace qpbae {

namespace {

void check_angles(std::span<const double> angles, int n_data_qubits) {
  const auto expected = static_cast<std::size_t>(mps_parameter_count(n_data_qubits));
  if (angles.size() != expected) {
    throw DimensionError("MPS ansatz on " + std::to_string(n_data_qubits) + " qubits needs " +
                         std::to_string(expected) + " angles, got " +
                         std::to_string(angles.size()));
  }
}

void check_patch_register(const StateVector& patch_state, const AutoencoderConfig& cfg) {
  if (patch_state.n_qubits() != cfg.n_data_qubits()) {
    throw DimensionError("patch state has " + std::to_string(patch_state.n_qubits()) +
                         " qubits, configuration expects " +
                         std::to_string(cfg.n_data_qubits()));
  }
}

// H, CSWAP(ancilla, a_i, b_i) for every pair, H; returns P(ancilla = 0).
double swap_test(StateVector& reg, int ancilla, int a_offset, int b_offset, int width) {
  reg.hadamard(ancilla);
  for (int i = 0; i < width; ++i) reg.cswap(ancilla, a_offset + i, b_offset + i);
  reg.hadamard(ancilla);
  return reg.prob_zero(ancilla);
}

// Scoring circuit without the trash reset: U^dagger U applied in place.
double similarity_straight(const StateVector& patch_state, std::span<const double> enc,
                           std::span<const double> dec, const AutoencoderConfig& cfg) {
  const int n = cfg.n_data_qubits();
  StateVector processed = patch_state;
  apply_encoder(processed, enc, n);
  apply_decoder(processed, dec, n);
  StateVector reg = tensor(tensor(processed, patch_state, cfg.max_qubits), StateVector(1),
                           cfg.max_qubits);
  return swap_test(reg, 2 * n, 0, n, n);
}

// Scoring circuit with the trash register discarded and re-prepared in |0>.
// The reset channel is simulated exactly as the ensemble over trash basis
// outcomes t: branch t keeps the amplitudes whose trash bits equal t, moved
// onto trash = 0, with weight equal to its squared norm. Each branch runs the
// decoder and SWAP test as a pure state; the ancilla statistic is the
// weighted sum.
double similarity_with_reset(const StateVector& patch_state, std::span<const double> enc,
                             std::span<const double> dec, const AutoencoderConfig& cfg) {
  const int n = cfg.n_data_qubits();
  const int n_t = cfg.n_trash();
  if (2 * n + 1 > cfg.max_qubits) {
    throw CapacityError("scoring circuit needs " + std::to_string(2 * n + 1) +
                        " qubits, cap is " + std::to_string(cfg.max_qubits));
  }
  StateVector encoded = patch_state;
  apply_encoder(encoded, enc, n);

  const std::size_t n_outcomes = std::size_t{1} << n_t;
  const std::size_t n_kept = std::size_t{1} << (n - n_t);
  double p_zero = 0.0;
  for (std::size_t t = 0; t < n_outcomes; ++t) {
    std::vector<Complex> branch(encoded.dim(), Complex{0.0, 0.0});
    double weight = 0.0;
    for (std::size_t c = 0; c < n_kept; ++c) {
      const Complex a = encoded[(c << n_t) | t];
      branch[c << n_t] = a;
      weight += std::norm(a);
    }
    if (!(weight > 0.0)) continue;
    StateVector decoded = StateVector::from_complex(std::move(branch), n, cfg.max_qubits);
    apply_decoder(decoded, dec, n);
    StateVector reg = tensor(tensor(decoded, patch_state, cfg.max_qubits), StateVector(1),
                             cfg.max_qubits);
    p_zero += weight * swap_test(reg, 2 * n, 0, n, n);
  }
  return p_zero;
}

}  // namespace

std::vector<MpsBlock> mps_block_layout(int n_data_qubits) {
  if (n_data_qubits < 2) {
    throw ArgumentError("MPS ansatz needs at least 2 qubits, got " +
                        std::to_string(n_data_qubits));
  }
  std::vector<MpsBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(n_data_qubits - 1));
  for (int j = 0; j + 1 < n_data_qubits; ++j) blocks.push_back({j, j + 1, 2 * j, 2 * j + 1});
  return blocks;
}

int mps_parameter_count(int n_data_qubits) {
  if (n_data_qubits < 2) {
    throw ArgumentError("MPS ansatz needs at least 2 qubits, got " +
                        std::to_string(n_data_qubits));
  }
  return 2 * (n_data_qubits - 1);
}

MpsParams::MpsParams(int n_data_qubits, std::vector<double> angles)
    : n_data_qubits_(n_data_qubits), angles_(std::move(angles)) {
  check_angles(angles_, n_data_qubits_);
}

MpsParams MpsParams::zeros(int n_data_qubits) {
  return MpsParams(n_data_qubits,
                   std::vector<double>(static_cast<std::size_t>(mps_parameter_count(n_data_qubits)),
                                       0.0));
}

MpsParams MpsParams::random(int n_data_qubits, std::mt19937_64& rng) {
  std::vector<double> angles(static_cast<std::size_t>(mps_parameter_count(n_data_qubits)));
  // 53 random mantissa bits -> [0, 1); avoids implementation-defined distributions.
  for (auto& a : angles) {
    a = 2.0 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return MpsParams(n_data_qubits, std::move(angles));
}

AutoencoderConfig AutoencoderConfig::make(int patch_size, int bottleneck_dim) {
  AutoencoderConfig cfg;
  cfg.patch_size = patch_size;
  cfg.bottleneck_dim = bottleneck_dim;
  const int n = cfg.n_data_qubits();
  if (bottleneck_dim < 1 || bottleneck_dim > n) {
    throw ArgumentError("bottleneck dimension " + std::to_string(bottleneck_dim) +
                        " outside [1, " + std::to_string(n) + "]");
  }
  return cfg;
}

int AutoencoderConfig::n_data_qubits() const {
  if (patch_size < 1) throw ArgumentError("patch size must be positive");
  const auto pixels = static_cast<unsigned>(patch_size * patch_size);
  if (!std::has_single_bit(pixels) || pixels < 4) {
    throw ArgumentError("patch size " + std::to_string(patch_size) +
                        " does not give a power-of-two pixel count >= 4");
  }
  return std::countr_zero(pixels);
}

double AutoencoderConfig::compression_percent() const {
  const double kept = std::ldexp(1.0, bottleneck_dim);
  const double pixels = static_cast<double>(patch_size) * patch_size;
  return (1.0 - kept / pixels) * 100.0;
}

void apply_encoder(StateVector& state, std::span<const double> angles, int n_data_qubits,
                   int offset) {
  check_angles(angles, n_data_qubits);
  for (const auto& b : mps_block_layout(n_data_qubits)) {
    state.ry(offset + b.first, angles[b.theta_first]);
    state.ry(offset + b.second, angles[b.theta_second]);
    state.cnot(offset + b.first, offset + b.second);
  }
}

void apply_decoder(StateVector& state, std::span<const double> angles, int n_data_qubits,
                   int offset) {
  check_angles(angles, n_data_qubits);
  const auto blocks = mps_block_layout(n_data_qubits);
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    state.cnot(offset + it->first, offset + it->second);
    state.ry(offset + it->second, -angles[it->theta_second]);
    state.ry(offset + it->first, -angles[it->theta_first]);
  }
}

StateVector apply_encoder(StateVector state, const MpsParams& params, int offset) {
  apply_encoder(state, params.angles(), params.n_data_qubits(), offset);
  return state;
}

StateVector apply_decoder(StateVector state, const MpsParams& params, int offset) {
  apply_decoder(state, params.angles(), params.n_data_qubits(), offset);
  return state;
}

double training_fidelity(const StateVector& patch_state, std::span<const double> angles,
                         const AutoencoderConfig& cfg) {
  check_patch_register(patch_state, cfg);
  const int n = cfg.n_data_qubits();
  const int n_t = cfg.n_trash();
  const int n_bd = cfg.bottleneck_dim;
  // [data: n | reference: n_t | ancilla: 1]
  StateVector reg = tensor(patch_state, StateVector(n_t + 1, cfg.max_qubits), cfg.max_qubits);
  apply_encoder(reg, angles, n);
  const int ancilla = n + n_t;
  reg.hadamard(ancilla);
  for (int i = 0; i < n_t; ++i) reg.cswap(ancilla, n_bd + i, n + i);
  reg.hadamard(ancilla);
  return reg.expect_z(ancilla);
}

double training_fidelity(const StateVector& patch_state, const MpsParams& params,
                         const AutoencoderConfig& cfg) {
  return training_fidelity(patch_state, params.angles(), cfg);
}

double test_similarity(const StateVector& patch_state, std::span<const double> encoder_angles,
                       std::span<const double> decoder_angles, const AutoencoderConfig& cfg) {
  check_patch_register(patch_state, cfg);
  if (cfg.n_trash() == 0 || !cfg.reset_trash_before_decode) {
    return similarity_straight(patch_state, encoder_angles, decoder_angles, cfg);
  }
  return similarity_with_reset(patch_state, encoder_angles, decoder_angles, cfg);
}

double test_similarity(const StateVector& patch_state, const MpsParams& params,
                       const AutoencoderConfig& cfg) {
  return test_similarity(patch_state, params.angles(), params.angles(), cfg);
}

double test_similarity_sampled(const StateVector& patch_state, const MpsParams& params,
                               const AutoencoderConfig& cfg, int shots, std::mt19937_64& rng) {
  if (shots <= 0) throw ArgumentError("shot count must be positive");
  const double p = test_similarity(patch_state, params, cfg);
  std::binomial_distribution<int> draw(shots, p);
  return static_cast<double>(draw(rng)) / shots;
}

std::vector<double> test_similarity_gradient(const StateVector& patch_state,
                                             const MpsParams& params,
                                             const AutoencoderConfig& cfg) {
  constexpr double kShift = std::numbers::pi / 2.0;
  const auto base = params.angles();
  std::vector<double> grad(base.size(), 0.0);
  std::vector<double> shifted(base.begin(), base.end());
  for (std::size_t k = 0; k < base.size(); ++k) {
    shifted[k] = base[k] + kShift;
    const double enc_plus = test_similarity(patch_state, shifted, base, cfg);
    const double dec_plus = test_similarity(patch_state, base, shifted, cfg);
    shifted[k] = base[k] - kShift;
    const double enc_minus = test_similarity(patch_state, shifted, base, cfg);
    const double dec_minus = test_similarity(patch_state, base, shifted, cfg);
    shifted[k] = base[k];
    grad[k] = 0.5 * (enc_plus - enc_minus) + 0.5 * (dec_plus - dec_minus);
  }
  return grad;
}

}  // namespace qpbae
