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
 * Dense statevector simulator used by every circuit in the autoencoder.
 *
 * Bit ordering: qubit 0 addresses the MOST significant bit of the
 * computational-basis index. For an n-qubit register, qubit q is bit
 * (n - 1 - q) of the index, so amplitude k of a flattened row-major patch
 * lands on basis state |k> with the first qubits selecting the patch row.
 * tensor(a, b) places `a` on the lower qubit indices.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qpbae {

using Complex = std::complex<double>;

/// Largest register the simulator will build unless a caller raises the cap.
inline constexpr int kMaxQubits = 14;

class StateVector {
 public:
  StateVector() = default;

  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits, int max_qubits = kMaxQubits);

  /// Computational-basis state |index>.
  static StateVector basis(int n_qubits, std::uint64_t index, int max_qubits = kMaxQubits);

  /// Real amplitudes values / ||values||_2. Throws DimensionError on a length
  /// mismatch and DegenerateInputError when the norm is zero.
  static StateVector from_amplitudes(std::span<const double> values, int n_qubits,
                                     int max_qubits = kMaxQubits);

  /// Complex amplitudes, renormalized to unit length.
  static StateVector from_complex(std::vector<Complex> values, int n_qubits,
                                  int max_qubits = kMaxQubits);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t k) const { return amplitudes_[k]; }
  double norm() const;

  // In-place gate application. Each validates its qubit arguments.
  void ry(int q, double theta);
  void hadamard(int q);
  void cnot(int control, int target);
  void cswap(int control, int a, int b);

  /// P(bit q = 0) - P(bit q = 1).
  double expect_z(int q) const;
  /// (1 + expect_z(q)) / 2, clamped to [0, 1].
  double prob_zero(int q) const;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::size_t bit_mask(int q) const noexcept {
    return std::size_t{1} << (n_qubits_ - 1 - q);
  }
  void check_qubit(int q) const;

  int n_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

// Value-returning forms of the gates. They copy the input state.
StateVector from_amplitudes(std::span<const double> values, int n_qubits);
StateVector apply_ry(StateVector state, int q, double theta);
StateVector apply_hadamard(StateVector state, int q);
StateVector apply_cnot(StateVector state, int control, int target);
StateVector apply_cswap(StateVector state, int control, int a, int b);
double expect_z(const StateVector& state, int q);
double prob_zero(const StateVector& state, int q);

/// Kronecker product a (x) b; throws CapacityError above max_qubits.
StateVector tensor(const StateVector& a, const StateVector& b, int max_qubits = kMaxQubits);

/// <a|b>.
Complex inner_product(const StateVector& a, const StateVector& b);

/// Shot-sampled estimate of prob_zero: a seeded binomial draw over `shots`
/// measurements of qubit q.
double sample_prob_zero(const StateVector& state, int q, int shots, std::mt19937_64& rng);

}  // namespace qpbae
