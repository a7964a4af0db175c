// Copyright 2026 The bitpredict Authors
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

// Dense statevector simulator for small registers (k <= 8).
//
// Qubit 0 is the most significant bit of the basis-state index, so on a
// k-qubit register qubit q is bit (k - 1 - q) of the index.
//
// Rotations are exp(-i * angle * P) with no factor of 1/2: the gate set is
//   pauli_rotation             R_P(a) = cos(a) I - i sin(a) P
//   controlled_pauli_rotation  (I - Pi) + Pi R_P(a) Pi,  Pi = |1><1| on control

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitpredict/rng.hpp"

namespace bitpredict::qsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 8;
inline constexpr double kNormTolerance = 1e-12;

enum class Pauli { X, Y, Z };

inline char to_char(Pauli p) { return p == Pauli::X ? 'X' : (p == Pauli::Y ? 'Y' : 'Z'); }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("unknown Pauli axis '") + c + "'");
  }
}

class QuantumState {
 public:
  /// |0...0> on k qubits.
  explicit QuantumState(std::size_t qubits) : QuantumState(qubits, 0) {}

  /// Computational basis state |index> on k qubits.
  QuantumState(std::size_t qubits, std::size_t index) : qubits_(qubits) {
    check_width(qubits);
    amplitudes_.assign(std::size_t{1} << qubits, Complex{});
    if (index >= amplitudes_.size()) throw std::out_of_range("basis index out of range");
    amplitudes_[index] = 1.0;
  }

  /// Takes ownership of an amplitude vector; its length must be 2^k and its
  /// norm must be 1 within kNormTolerance.
  static QuantumState from_amplitudes(std::vector<Complex> amplitudes) {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < amplitudes.size()) ++k;
    if ((std::size_t{1} << k) != amplitudes.size()) throw std::invalid_argument("amplitude count is not a power of two");
    check_width(k);
    QuantumState s(k, UncheckedTag{});
    s.amplitudes_ = std::move(amplitudes);
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) throw std::invalid_argument("state is not normalized");
    return s;
  }

  std::size_t qubits() const noexcept { return qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::span<Complex> mutable_amplitudes() noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm_squared() const noexcept {
    double n = 0;
    for (const auto& a : amplitudes_) n += std::norm(a);
    return n;
  }

 private:
  struct UncheckedTag {};
  QuantumState(std::size_t qubits, UncheckedTag) : qubits_(qubits) {}

  static void check_width(std::size_t k) {
    if (k < 1 || k > kMaxQubits) throw std::invalid_argument("qubit count must be in [1, 8]");
  }

  std::size_t qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

enum class GateKind { pauli_rotation, controlled_pauli_rotation };

struct Gate {
  GateKind kind = GateKind::pauli_rotation;
  Pauli axis = Pauli::Z;
  double angle = 0.0;
  std::size_t target = 0;
  std::optional<std::size_t> control;

  static Gate rotation(Pauli axis, double angle, std::size_t target) {
    return Gate{GateKind::pauli_rotation, axis, angle, target, std::nullopt};
  }
  static Gate controlled(Pauli axis, double angle, std::size_t control, std::size_t target) {
    return Gate{GateKind::controlled_pauli_rotation, axis, angle, target, control};
  }

  Gate inverse() const {
    Gate g = *this;
    g.angle = -angle;
    return g;
  }
};

struct Observable {
  std::size_t qubit = 0;  // Pauli Z on this qubit
};

namespace detail {

inline std::size_t qubit_mask(std::size_t k, std::size_t q) { return std::size_t{1} << (k - 1 - q); }

inline void check_gate(const Gate& g, std::size_t k) {
  if (g.target >= k) throw std::out_of_range("gate target index out of range");
  if (g.kind == GateKind::controlled_pauli_rotation) {
    if (!g.control) throw std::invalid_argument("controlled gate without a control qubit");
    if (*g.control >= k) throw std::out_of_range("gate control index out of range");
    if (*g.control == g.target) throw std::invalid_argument("gate control equals target");
  } else if (g.control) {
    throw std::invalid_argument("uncontrolled gate carries a control qubit");
  }
}

/// Applies a gate to a raw amplitude buffer of a k-qubit register.
inline void apply_unchecked(std::span<Complex> amps, std::size_t k, const Gate& g) {
  const double c = std::cos(g.angle);
  const double s = std::sin(g.angle);
  const std::size_t tmask = qubit_mask(k, g.target);
  const std::size_t cmask = g.control ? qubit_mask(k, *g.control) : 0;
  const std::size_t n = amps.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i & tmask) continue;
    if ((i & cmask) != cmask) continue;
    Complex& a0 = amps[i];
    Complex& a1 = amps[i | tmask];
    const Complex x0 = a0;
    const Complex x1 = a1;
    switch (g.axis) {
      case Pauli::X:  // [[c, -is], [-is, c]]
        a0 = c * x0 + Complex(0, -s) * x1;
        a1 = Complex(0, -s) * x0 + c * x1;
        break;
      case Pauli::Y:  // [[c, -s], [s, c]]
        a0 = c * x0 - s * x1;
        a1 = s * x0 + c * x1;
        break;
      case Pauli::Z:  // diag(c - is, c + is)
        a0 = Complex(c, -s) * x0;
        a1 = Complex(c, s) * x1;
        break;
    }
  }
}

inline void apply_z(std::span<Complex> amps, std::size_t k, std::size_t q) {
  const std::size_t mask = qubit_mask(k, q);
  for (std::size_t i = 0; i < amps.size(); ++i)
    if (i & mask) amps[i] = -amps[i];
}

inline void apply_hadamard(std::span<Complex> amps, std::size_t k, std::size_t q) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::size_t mask = qubit_mask(k, q);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    const Complex x0 = amps[i];
    const Complex x1 = amps[i | mask];
    amps[i] = r * (x0 + x1);
    amps[i | mask] = r * (x0 - x1);
  }
}

/// S^dagger = diag(1, -i).
inline void apply_sdg(std::span<Complex> amps, std::size_t k, std::size_t q) {
  const std::size_t mask = qubit_mask(k, q);
  for (std::size_t i = 0; i < amps.size(); ++i)
    if (i & mask) amps[i] *= Complex(0, -1);
}

inline double z_expectation(std::span<const Complex> amps, std::size_t k, std::size_t q) {
  const std::size_t mask = qubit_mask(k, q);
  double e = 0;
  for (std::size_t i = 0; i < amps.size(); ++i) e += (i & mask) ? -std::norm(amps[i]) : std::norm(amps[i]);
  return e;
}

}  // namespace detail

/// Applies `gate` in place.
inline void apply_gate_inplace(QuantumState& state, const Gate& gate) {
  detail::check_gate(gate, state.qubits());
  detail::apply_unchecked(state.mutable_amplitudes(), state.qubits(), gate);
}

inline QuantumState apply_gate(QuantumState state, const Gate& gate) {
  apply_gate_inplace(state, gate);
  return state;
}

/// Applies gates in list order.
inline void apply_gates_inplace(QuantumState& state, std::span<const Gate> gates) {
  for (const auto& g : gates) apply_gate_inplace(state, g);
}

inline QuantumState apply_gates(QuantumState state, std::span<const Gate> gates) {
  apply_gates_inplace(state, gates);
  return state;
}

inline void check_observable(const Observable& obs, std::size_t k) {
  if (obs.qubit >= k) throw std::out_of_range("observable qubit out of range");
}

/// <psi| Z_q |psi>.
inline double expectation(const QuantumState& state, const Observable& obs) {
  check_observable(obs, state.qubits());
  return detail::z_expectation(state.amplitudes(), state.qubits(), obs.qubit);
}

/// Probability of reading `outcome` (+1 or -1) when measuring Z on `qubit`.
inline double outcome_probability(const QuantumState& state, std::size_t qubit, int outcome) {
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("outcome must be +1 or -1");
  check_observable(Observable{qubit}, state.qubits());
  const std::size_t mask = detail::qubit_mask(state.qubits(), qubit);
  double p = 0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const bool one = (i & mask) != 0;
    if (one == (outcome == -1)) p += std::norm(state[i]);
  }
  return p;
}

/// One projective Z measurement on `qubit`; returns +1 or -1.
inline int sample_measurement(const QuantumState& state, std::size_t qubit, Rng& rng) {
  const double p_minus = outcome_probability(state, qubit, -1);
  return rng.uniform() < p_minus ? -1 : 1;
}

enum class OverlapPart { real, imaginary };

struct Analytic {};
struct Sampled {
  std::size_t shots = 0;
  Rng* rng = nullptr;
};
using HadamardMode = std::variant<Analytic, Sampled>;

/// <V psi | Z_obs | W psi>, computed exactly.
inline Complex overlap(const QuantumState& psi, std::span<const Gate> left, std::span<const Gate> right,
                       const Observable& obs) {
  check_observable(obs, psi.qubits());
  QuantumState v = apply_gates(psi, left);
  QuantumState w = apply_gates(psi, right);
  detail::apply_z(w.mutable_amplitudes(), w.qubits(), obs.qubit);
  Complex acc{};
  for (std::size_t i = 0; i < v.dimension(); ++i) acc += std::conj(v[i]) * w[i];
  return acc;
}

/// Re or Im of <V psi | Z_obs | W psi>.
///
/// Analytic mode evaluates the overlap directly. Sampled mode simulates the
/// ancilla-extended protocol on k + 1 qubits: ancilla (qubit 0) prepared in
/// |+> (followed by S^dagger for the imaginary part), controlled-(V^dagger Z W)
/// on the register, a final Hadamard, then `shots` ancilla measurements; the
/// estimate is (#(+1) - #(-1)) / shots.
inline double hadamard_test(const QuantumState& psi, std::span<const Gate> left, std::span<const Gate> right,
                            const Observable& obs, const HadamardMode& mode, OverlapPart part) {
  if (std::holds_alternative<Analytic>(mode)) {
    const Complex z = overlap(psi, left, right, obs);
    return part == OverlapPart::real ? z.real() : z.imag();
  }
  const auto& sampled = std::get<Sampled>(mode);
  if (sampled.shots == 0) throw std::invalid_argument("hadamard_test: sampled mode needs at least one shot");
  if (sampled.rng == nullptr) throw std::invalid_argument("hadamard_test: sampled mode needs a generator");
  const std::size_t k = psi.qubits();
  if (k + 1 > kMaxQubits) throw std::invalid_argument("hadamard_test: no room for the ancilla");
  check_observable(obs, k);
  for (const auto& g : left) detail::check_gate(g, k);
  for (const auto& g : right) detail::check_gate(g, k);

  const std::size_t dim = psi.dimension();
  std::vector<Complex> ext(2 * dim);
  std::span<Complex> amps(ext);
  // |0>|psi> then H on the ancilla: both halves hold psi / sqrt(2).
  for (std::size_t i = 0; i < dim; ++i) amps[i] = psi[i];
  detail::apply_hadamard(amps, k + 1, 0);
  if (part == OverlapPart::imaginary) detail::apply_sdg(amps, k + 1, 0);
  // Controlled on ancilla = 1, which is the upper half of the buffer.
  std::span<Complex> branch = amps.subspan(dim, dim);
  for (const auto& g : right) detail::apply_unchecked(branch, k, g);
  detail::apply_z(branch, k, obs.qubit);
  for (auto it = left.rbegin(); it != left.rend(); ++it) detail::apply_unchecked(branch, k, it->inverse());
  detail::apply_hadamard(amps, k + 1, 0);

  const QuantumState extended = QuantumState::from_amplitudes(std::move(ext));
  long long sum = 0;
  for (std::size_t i = 0; i < sampled.shots; ++i) sum += sample_measurement(extended, 0, *sampled.rng);
  return static_cast<double>(sum) / static_cast<double>(sampled.shots);
}

/// Debug dump: JSON array of [re, im] pairs.
inline nlohmann::json to_json(const QuantumState& state) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : state.amplitudes()) out.push_back({a.real(), a.imag()});
  return out;
}

}  // namespace bitpredict::qsim
