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

#include "qpbae/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "qpbae/errors.hpp"

namespace qpbae {

namespace {

void check_register_size(int n_qubits, int max_qubits) {
  if (n_qubits < 0) {
    throw DimensionError("negative qubit count " + std::to_string(n_qubits));
  }
  if (n_qubits > max_qubits) {
    throw CapacityError("register of " + std::to_string(n_qubits) +
                        " qubits exceeds the cap of " + std::to_string(max_qubits));
  }
}

}  // namespace

StateVector::StateVector(int n_qubits, int max_qubits) {
  check_register_size(n_qubits, max_qubits);
  n_qubits_ = n_qubits;
  amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amplitudes_[0] = 1.0;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index, int max_qubits) {
  StateVector s(n_qubits, max_qubits);
  if (index >= s.dim()) {
    throw IndexError("basis index " + std::to_string(index) + " out of range");
  }
  s.amplitudes_[0] = 0.0;
  s.amplitudes_[index] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(std::span<const double> values, int n_qubits,
                                         int max_qubits) {
  check_register_size(n_qubits, max_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (values.size() != dim) {
    throw DimensionError("expected " + std::to_string(dim) + " amplitudes, got " +
                         std::to_string(values.size()));
  }
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw DegenerateInputError("cannot normalize a zero-norm amplitude vector");
  }
  const double inv = 1.0 / std::sqrt(sq);
  StateVector s;
  s.n_qubits_ = n_qubits;
  s.amplitudes_.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) s.amplitudes_[k] = values[k] * inv;
  return s;
}

StateVector StateVector::from_complex(std::vector<Complex> values, int n_qubits,
                                      int max_qubits) {
  check_register_size(n_qubits, max_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (values.size() != dim) {
    throw DimensionError("expected " + std::to_string(dim) + " amplitudes, got " +
                         std::to_string(values.size()));
  }
  double sq = 0.0;
  for (const auto& v : values) sq += std::norm(v);
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw DegenerateInputError("cannot normalize a zero-norm amplitude vector");
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& v : values) v *= inv;
  StateVector s;
  s.n_qubits_ = n_qubits;
  s.amplitudes_ = std::move(values);
  return s;
}

double StateVector::norm() const {
  double sq = 0.0;
  for (const auto& a : amplitudes_) sq += std::norm(a);
  return std::sqrt(sq);
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits_) {
    throw IndexError("qubit " + std::to_string(q) + " out of range for a " +
                     std::to_string(n_qubits_) + "-qubit register");
  }
}

void StateVector::ry(int q, double theta) {
  check_qubit(q);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const std::size_t m = bit_mask(q);
  const std::size_t d = dim();
  for (std::size_t base = 0; base < d; base += 2 * m) {
    for (std::size_t i = base; i < base + m; ++i) {
      const Complex a0 = amplitudes_[i];
      const Complex a1 = amplitudes_[i + m];
      amplitudes_[i] = c * a0 - s * a1;
      amplitudes_[i + m] = s * a0 + c * a1;
    }
  }
}

void StateVector::hadamard(int q) {
  check_qubit(q);
  const double r = 1.0 / std::numbers::sqrt2;
  const std::size_t m = bit_mask(q);
  const std::size_t d = dim();
  for (std::size_t base = 0; base < d; base += 2 * m) {
    for (std::size_t i = base; i < base + m; ++i) {
      const Complex a0 = amplitudes_[i];
      const Complex a1 = amplitudes_[i + m];
      amplitudes_[i] = r * (a0 + a1);
      amplitudes_[i + m] = r * (a0 - a1);
    }
  }
}

void StateVector::cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw ArgumentError("CNOT control and target coincide");
  const std::size_t cm = bit_mask(control);
  const std::size_t tm = bit_mask(target);
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) {
    if ((i & cm) && !(i & tm)) std::swap(amplitudes_[i], amplitudes_[i | tm]);
  }
}

void StateVector::cswap(int control, int a, int b) {
  check_qubit(control);
  check_qubit(a);
  check_qubit(b);
  if (control == a || control == b || a == b) {
    throw ArgumentError("CSWAP qubits must be pairwise distinct");
  }
  const std::size_t cm = bit_mask(control);
  const std::size_t am = bit_mask(a);
  const std::size_t bm = bit_mask(b);
  const std::size_t d = dim();
  // Visit each (a=1, b=0) index once and exchange it with its (a=0, b=1) partner.
  for (std::size_t i = 0; i < d; ++i) {
    if ((i & cm) && (i & am) && !(i & bm)) {
      std::swap(amplitudes_[i], amplitudes_[(i & ~am) | bm]);
    }
  }
}

double StateVector::expect_z(int q) const {
  check_qubit(q);
  const std::size_t m = bit_mask(q);
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i & m) {
      p1 += std::norm(amplitudes_[i]);
    } else {
      p0 += std::norm(amplitudes_[i]);
    }
  }
  return p0 - p1;
}

double StateVector::prob_zero(int q) const {
  return std::clamp(0.5 * (1.0 + expect_z(q)), 0.0, 1.0);
}

StateVector from_amplitudes(std::span<const double> values, int n_qubits) {
  return StateVector::from_amplitudes(values, n_qubits);
}

StateVector apply_ry(StateVector state, int q, double theta) {
  state.ry(q, theta);
  return state;
}

StateVector apply_hadamard(StateVector state, int q) {
  state.hadamard(q);
  return state;
}

StateVector apply_cnot(StateVector state, int control, int target) {
  state.cnot(control, target);
  return state;
}

StateVector apply_cswap(StateVector state, int control, int a, int b) {
  state.cswap(control, a, b);
  return state;
}

double expect_z(const StateVector& state, int q) { return state.expect_z(q); }

double prob_zero(const StateVector& state, int q) { return state.prob_zero(q); }

StateVector tensor(const StateVector& a, const StateVector& b, int max_qubits) {
  const int n = a.n_qubits() + b.n_qubits();
  if (n > max_qubits) {
    throw CapacityError("tensor product of " + std::to_string(n) +
                        " qubits exceeds the cap of " + std::to_string(max_qubits));
  }
  std::vector<Complex> out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  }
  return StateVector::from_complex(std::move(out), n, max_qubits);
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner product of mismatched registers");
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.dim(); ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

double sample_prob_zero(const StateVector& state, int q, int shots, std::mt19937_64& rng) {
  if (shots <= 0) throw ArgumentError("shot count must be positive");
  std::binomial_distribution<int> draw(shots, state.prob_zero(q));
  return static_cast<double>(draw(rng)) / shots;
}

}  // namespace qpbae
