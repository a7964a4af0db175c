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

// Variational circuit families.
//
// Polar circuits: B entangling blocks followed by a dressing gate on the
// measured qubit. A block on k qubits is
//   * one learnable single-qubit gate per qubit, and
//   * the cyclic controlled layer C_r(V_0), C_{2r}(V_r), ..., C_0(V_{(k-1)r})
//     (indices mod k, C_c(V_t) = control c, target t), applied in that order.
// Every learnable single-qubit gate V is R_Z(a) followed by R_X(b), and the
// controlled version controls both rotations. A block therefore owns 4k
// angles; untied circuits have 4kB + 2 parameters and tied circuits share one
// block's 4k angles across all blocks (4k + 2 parameters).
//
// The two-qubit circuit is the fixed 8-parameter form
//   R_Z(t1) x R_Z(t2), R_X(t3) x R_X(t4), C_10(R_X(t5)), C_01(R_X(t6)),
//   R_Z(t7), R_X(t8) on the measured qubit (qubit 1 by default).

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitpredict/qsim.hpp"

namespace bitpredict {

using ParameterVector = std::vector<double>;

struct CircuitGeometry {
  std::size_t qubits = 2;
  std::size_t blocks = 2;
  std::size_t range = 1;
  bool tied = false;
  std::size_t measured_qubit = 0;

  void validate() const {
    if (qubits < 2 || qubits > qsim::kMaxQubits) throw std::invalid_argument("polar circuit needs 2..8 qubits");
    if (blocks < 1) throw std::invalid_argument("polar circuit needs at least one block");
    if (range < 1 || range >= qubits) throw std::invalid_argument("entangling range must satisfy 1 <= r < k");
    if (std::gcd(qubits, range) != 1) throw std::invalid_argument("entangling range must be coprime to the qubit count");
    if (measured_qubit >= qubits) throw std::invalid_argument("measured qubit out of range");
  }

  std::size_t parameter_count() const { return tied ? 4 * qubits + 2 : 4 * qubits * blocks + 2; }
};

/// custom: hand-assembled with CircuitBuilder; cannot be rebuilt from a spec.
enum class CircuitFamily { polar, two_qubit, custom };

struct CircuitSpec {
  CircuitFamily family = CircuitFamily::two_qubit;
  CircuitGeometry geometry{2, 1, 1, false, 1};  // polar: full geometry; two_qubit: measured_qubit only

  std::size_t qubits() const { return family == CircuitFamily::two_qubit ? 2 : geometry.qubits; }
};

/// A gate whose angle is read from parameter `param`.
struct ParamGate {
  qsim::GateKind kind = qsim::GateKind::pauli_rotation;
  qsim::Pauli axis = qsim::Pauli::Z;
  std::size_t target = 0;
  std::optional<std::size_t> control;
  std::size_t param = 0;
  std::size_t logical = 0;  // index of the logical gate this rotation belongs to
};

struct LogicalGate {
  std::vector<std::size_t> qubits;
  std::string label;
};

class CompiledCircuit {
 public:
  const CircuitSpec& spec() const noexcept { return spec_; }
  std::size_t qubits() const noexcept { return qubits_; }
  std::size_t measured_qubit() const noexcept { return measured_; }
  std::size_t parameter_count() const noexcept { return parameter_count_; }
  std::span<const ParamGate> gates() const noexcept { return gates_; }
  std::span<const LogicalGate> logical_gates() const noexcept { return logical_; }

  /// layout()[b][p]: parameter index of angle slot p in block b. The final
  /// entry holds the dressing gate's two slots.
  const std::vector<std::vector<std::size_t>>& layout() const noexcept { return layout_; }

  /// Depth in logical gates (greedy as-soon-as-possible layering).
  std::size_t logical_depth() const {
    std::vector<std::size_t> level(qubits_, 0);
    std::size_t depth = 0;
    for (const auto& g : logical_) {
      std::size_t at = 0;
      for (auto q : g.qubits) at = std::max(at, level[q]);
      for (auto q : g.qubits) level[q] = at + 1;
      depth = std::max(depth, at + 1);
    }
    return depth;
  }

  /// Gate positions (in application order) that read parameter j.
  std::vector<std::size_t> occurrences(std::size_t j) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < gates_.size(); ++i)
      if (gates_[i].param == j) out.push_back(i);
    return out;
  }

  void check_parameters(std::span<const double> params) const {
    if (params.size() != parameter_count_)
      throw std::invalid_argument("parameter vector has " + std::to_string(params.size()) + " entries; circuit expects " +
                                  std::to_string(parameter_count_));
  }

  qsim::Gate bind_gate(std::size_t i, double angle) const {
    const auto& g = gates_[i];
    return qsim::Gate{g.kind, g.axis, angle, g.target, g.control};
  }

  /// Concrete gate list for a parameter vector.
  std::vector<qsim::Gate> bind(std::span<const double> params) const {
    check_parameters(params);
    std::vector<qsim::Gate> out;
    out.reserve(gates_.size());
    for (std::size_t i = 0; i < gates_.size(); ++i) out.push_back(bind_gate(i, params[gates_[i].param]));
    return out;
  }

  /// Exact inverse: reversed gate order, negated angles.
  std::vector<qsim::Gate> bind_inverse(std::span<const double> params) const {
    auto gates = bind(params);
    std::reverse(gates.begin(), gates.end());
    for (auto& g : gates) g.angle = -g.angle;
    return gates;
  }

 private:
  friend class CircuitBuilder;
  CircuitSpec spec_;
  std::size_t qubits_ = 0;
  std::size_t measured_ = 0;
  std::size_t parameter_count_ = 0;
  std::vector<ParamGate> gates_;
  std::vector<LogicalGate> logical_;
  std::vector<std::vector<std::size_t>> layout_;
};

class CircuitBuilder {
 public:
  CircuitBuilder(CircuitSpec spec, std::size_t qubits, std::size_t measured) {
    c_.spec_ = spec;
    c_.qubits_ = qubits;
    c_.measured_ = measured;
  }

  void rotation(qsim::Pauli axis, std::size_t target, std::size_t param) {
    c_.gates_.push_back({qsim::GateKind::pauli_rotation, axis, target, std::nullopt, param, current_logical()});
    touch(param);
  }
  void controlled(qsim::Pauli axis, std::size_t control, std::size_t target, std::size_t param) {
    c_.gates_.push_back({qsim::GateKind::controlled_pauli_rotation, axis, target, control, param, current_logical()});
    touch(param);
  }
  void begin_logical(std::vector<std::size_t> qubits, std::string label) {
    c_.logical_.push_back({std::move(qubits), std::move(label)});
  }
  void set_layout(std::vector<std::vector<std::size_t>> layout) { c_.layout_ = std::move(layout); }

  CompiledCircuit finish() && { return std::move(c_); }

 private:
  std::size_t current_logical() const {
    if (c_.logical_.empty()) throw std::logic_error("CircuitBuilder: gate added outside a logical gate");
    return c_.logical_.size() - 1;
  }
  void touch(std::size_t param) { c_.parameter_count_ = std::max(c_.parameter_count_, param + 1); }

  CompiledCircuit c_;
};

inline CompiledCircuit build_polar_circuit(const CircuitGeometry& geometry) {
  geometry.validate();
  using qsim::Pauli;
  const std::size_t k = geometry.qubits;
  const std::size_t r = geometry.range;
  CircuitBuilder b(CircuitSpec{CircuitFamily::polar, geometry}, k, geometry.measured_qubit);
  std::vector<std::vector<std::size_t>> layout;
  for (std::size_t block = 0; block < geometry.blocks; ++block) {
    const std::size_t base = geometry.tied ? 0 : 4 * k * block;
    std::vector<std::size_t> slots;
    for (std::size_t q = 0; q < k; ++q) {
      const std::size_t p = base + 2 * q;
      b.begin_logical({q}, "V" + std::to_string(q));
      b.rotation(Pauli::Z, q, p);
      b.rotation(Pauli::X, q, p + 1);
      slots.insert(slots.end(), {p, p + 1});
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t target = (i * r) % k;
      const std::size_t control = ((i + 1) * r) % k;
      const std::size_t p = base + 2 * k + 2 * i;
      b.begin_logical({control, target}, "C" + std::to_string(control) + "(V" + std::to_string(target) + ")");
      b.controlled(Pauli::Z, control, target, p);
      b.controlled(Pauli::X, control, target, p + 1);
      slots.insert(slots.end(), {p, p + 1});
    }
    layout.push_back(std::move(slots));
  }
  const std::size_t dress = geometry.tied ? 4 * k : 4 * k * geometry.blocks;
  const std::size_t m = geometry.measured_qubit;
  b.begin_logical({m}, "dress");
  b.rotation(Pauli::Z, m, dress);
  b.rotation(Pauli::X, m, dress + 1);
  layout.push_back({dress, dress + 1});
  b.set_layout(std::move(layout));
  return std::move(b).finish();
}

inline CompiledCircuit build_two_qubit_circuit(std::size_t measured_qubit = 1) {
  if (measured_qubit > 1) throw std::invalid_argument("two-qubit circuit: measured qubit must be 0 or 1");
  using qsim::Pauli;
  CircuitSpec spec{CircuitFamily::two_qubit, CircuitGeometry{2, 1, 1, false, measured_qubit}};
  CircuitBuilder b(spec, 2, measured_qubit);
  b.begin_logical({0}, "RZ0");
  b.rotation(Pauli::Z, 0, 0);
  b.begin_logical({1}, "RZ1");
  b.rotation(Pauli::Z, 1, 1);
  b.begin_logical({0}, "RX0");
  b.rotation(Pauli::X, 0, 2);
  b.begin_logical({1}, "RX1");
  b.rotation(Pauli::X, 1, 3);
  b.begin_logical({1, 0}, "C10");
  b.controlled(Pauli::X, 1, 0, 4);
  b.begin_logical({0, 1}, "C01");
  b.controlled(Pauli::X, 0, 1, 5);
  b.begin_logical({measured_qubit}, "dress");
  b.rotation(Pauli::Z, measured_qubit, 6);
  b.rotation(Pauli::X, measured_qubit, 7);
  b.set_layout({{0, 1, 2, 3, 4, 5}, {6, 7}});
  return std::move(b).finish();
}

inline CompiledCircuit build_circuit(const CircuitSpec& spec) {
  if (spec.family == CircuitFamily::custom) throw std::invalid_argument("custom circuits cannot be rebuilt from a spec");
  return spec.family == CircuitFamily::polar ? build_polar_circuit(spec.geometry)
                                             : build_two_qubit_circuit(spec.geometry.measured_qubit);
}

/// U(params) applied to `state`.
inline qsim::QuantumState apply_circuit(const CompiledCircuit& circuit, std::span<const double> params,
                                        qsim::QuantumState state) {
  if (state.qubits() != circuit.qubits())
    throw std::invalid_argument("apply_circuit: state has " + std::to_string(state.qubits()) +
                                " qubits; circuit acts on " + std::to_string(circuit.qubits()));
  const auto gates = circuit.bind(params);
  qsim::apply_gates_inplace(state, gates);
  return state;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const CircuitSpec& spec) {
  nlohmann::json j;
  if (spec.family == CircuitFamily::custom) throw std::invalid_argument("custom circuits are not serializable");
  if (spec.family == CircuitFamily::two_qubit) {
    j["family"] = "two_qubit";
    j["measured_qubit"] = spec.geometry.measured_qubit;
    return j;
  }
  j["family"] = "polar";
  j["qubits"] = spec.geometry.qubits;
  j["blocks"] = spec.geometry.blocks;
  j["range"] = spec.geometry.range;
  j["tied"] = spec.geometry.tied;
  j["measured_qubit"] = spec.geometry.measured_qubit;
  return j;
}

inline CircuitSpec circuit_spec_from_json(const nlohmann::json& j) {
  CircuitSpec spec;
  const std::string family = j.value("family", "two_qubit");
  if (family == "two_qubit") {
    spec.family = CircuitFamily::two_qubit;
    spec.geometry = CircuitGeometry{2, 1, 1, false, j.value("measured_qubit", std::size_t{1})};
  } else if (family == "polar") {
    spec.family = CircuitFamily::polar;
    spec.geometry.qubits = j.at("qubits").get<std::size_t>();
    spec.geometry.blocks = j.value("blocks", std::size_t{2});
    spec.geometry.range = j.value("range", std::size_t{1});
    spec.geometry.tied = j.value("tied", false);
    spec.geometry.measured_qubit = j.value("measured_qubit", std::size_t{0});
    spec.geometry.validate();
  } else {
    throw std::invalid_argument("unknown circuit family '" + family + "'");
  }
  return spec;
}

/// Checkpoint form: geometry, parameter layout and angles.
inline nlohmann::json to_json(const CompiledCircuit& circuit, std::span<const double> params) {
  circuit.check_parameters(params);
  nlohmann::json j;
  j["circuit"] = to_json(circuit.spec());
  j["layout"] = circuit.layout();
  j["angles"] = std::vector<double>(params.begin(), params.end());
  return j;
}

}  // namespace bitpredict
