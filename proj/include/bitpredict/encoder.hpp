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

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bitpredict/bitstream.hpp"
#include "bitpredict/qsim.hpp"

namespace bitpredict {

enum class EncodingMethod { qubit, amplitude };

inline std::string_view to_string(EncodingMethod m) { return m == EncodingMethod::qubit ? "qubit" : "amplitude"; }

inline EncodingMethod parse_encoding(std::string_view s) {
  if (s == "qubit") return EncodingMethod::qubit;
  if (s == "amplitude") return EncodingMethod::amplitude;
  throw std::invalid_argument("unknown encoding method '" + std::string(s) + "'");
}

/// Register width needed by an encoding of d-grams.
///   qubit:     k = d
///   amplitude: k = ceil(log2(d + 1)), so indices 0..d all fit
inline std::size_t encoding_qubits(EncodingMethod method, std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("encoding depth must be >= 1");
  if (method == EncodingMethod::qubit) return depth;
  std::size_t k = 0;
  while ((std::size_t{1} << k) < depth + 1) ++k;
  return k;
}

struct EncodingSpec {
  EncodingMethod method = EncodingMethod::amplitude;
  std::size_t depth = 3;

  std::size_t qubits() const { return encoding_qubits(method, depth); }

  void validate() const {
    const std::size_t k = qubits();
    if (k < 1 || k > qsim::kMaxQubits)
      throw std::invalid_argument("encoding needs " + std::to_string(k) + " qubits; supported range is 1..8");
  }
};

/// qubit:     |b[t-1] b[t-2] ... b[t-d]>, qubit 0 holding b[t-1]
/// amplitude: nu (|0> + sum_s b[t-s] |s>), nu = 1 / sqrt(1 + popcount)
inline qsim::QuantumState encode(const EncodingSpec& spec, const DGram& gram) {
  if (gram.depth() != spec.depth)
    throw std::invalid_argument("encode: gram depth " + std::to_string(gram.depth()) + " does not match encoding depth " +
                                std::to_string(spec.depth));
  spec.validate();
  const std::size_t k = spec.qubits();
  if (spec.method == EncodingMethod::qubit) {
    std::size_t index = 0;
    for (std::size_t s = 0; s < spec.depth; ++s) index = (index << 1) | gram[s];
    return qsim::QuantumState(k, index);
  }
  std::vector<qsim::Complex> amps(std::size_t{1} << k);
  std::size_t ones = 0;
  for (std::size_t s = 0; s < spec.depth; ++s) ones += gram[s];
  const double nu = 1.0 / std::sqrt(1.0 + static_cast<double>(ones));
  amps[0] = nu;
  for (std::size_t s = 1; s <= spec.depth; ++s)
    if (gram[s - 1]) amps[s] = nu;
  return qsim::QuantumState::from_amplitudes(std::move(amps));
}

}  // namespace bitpredict
