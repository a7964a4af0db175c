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

// Training quantum circuit classifiers.
//
// A dataset is a list of (d-gram, next bit) cases. The circuit U(theta) is
// applied to the encoded gram and Z is read on the measured qubit m; the
// forecast probability of bit 1 is the probability of reading -1. The
// training objective is the likelihood-style utility
//
//   L(theta) = sum_t <U psi_t | Pi_{b_t} | U psi_t>
//            = N/2 + 1/2 sum_t (-1)^{b_t} <U psi_t | Z_m | U psi_t>,
//
// with Pi_b the projector onto the (-1)^b eigenspace of Z_m. L is maximized.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitpredict/bitstream.hpp"
#include "bitpredict/circuits.hpp"
#include "bitpredict/encoder.hpp"
#include "bitpredict/qsim.hpp"
#include "bitpredict/rng.hpp"

namespace bitpredict {

struct LabeledCase {
  DGram gram;
  Bit label = 0;
};

struct LabeledDataset {
  EncodingSpec encoding;
  std::vector<LabeledCase> cases;

  std::size_t size() const noexcept { return cases.size(); }

  /// One case per position t in [d, L) of the window.
  static LabeledDataset from_window(std::span<const Bit> window, const EncodingSpec& encoding) {
    const std::size_t d = encoding.depth;
    if (window.size() < d + 1) throw std::invalid_argument("from_window: window width must be >= d + 1");
    LabeledDataset ds{encoding, {}};
    ds.cases.reserve(window.size() - d);
    for (std::size_t t = d; t < window.size(); ++t) ds.cases.push_back({DGram::at(window, t, d), window[t]});
    return ds;
  }
};

/// Cases grouped by distinct encoded state. weight = sum of (-1)^label over
/// the group, so sums over cases become sums over at most 2^d groups.
struct EncodedDataset {
  std::size_t case_count = 0;
  std::size_t qubits = 0;
  std::vector<qsim::QuantumState> states;
  std::vector<double> weights;

  static EncodedDataset build(const LabeledDataset& ds) {
    ds.encoding.validate();
    EncodedDataset out;
    out.case_count = ds.size();
    out.qubits = ds.encoding.qubits();
    std::map<std::uint64_t, std::size_t> slot;
    for (const auto& c : ds.cases) {
      if (c.gram.depth() != ds.encoding.depth) throw std::invalid_argument("dataset gram depth mismatch");
      if (c.label > 1) throw std::invalid_argument("dataset label is not a bit");
      auto [it, inserted] = slot.try_emplace(c.gram.key(), out.states.size());
      if (inserted) {
        out.states.push_back(encode(ds.encoding, c.gram));
        out.weights.push_back(0.0);
      }
      out.weights[it->second] += c.label ? -1.0 : 1.0;
    }
    return out;
  }
};

namespace detail {
inline void check_width(const CompiledCircuit& circuit, std::size_t qubits) {
  if (circuit.qubits() != qubits)
    throw std::invalid_argument("encoding width " + std::to_string(qubits) + " does not match circuit width " +
                                std::to_string(circuit.qubits()));
}

inline double signed_expectation_sum(const std::vector<qsim::Gate>& gates, const EncodedDataset& data,
                                     std::size_t measured) {
  double acc = 0;
  for (std::size_t g = 0; g < data.states.size(); ++g) {
    if (data.weights[g] == 0.0) continue;
    qsim::QuantumState s = data.states[g];
    qsim::apply_gates_inplace(s, gates);
    acc += data.weights[g] * qsim::expectation(s, qsim::Observable{measured});
  }
  return acc;
}
}  // namespace detail

inline double utility(std::span<const double> params, const CompiledCircuit& circuit, const EncodedDataset& data) {
  detail::check_width(circuit, data.qubits);
  const auto gates = circuit.bind(params);
  return 0.5 * static_cast<double>(data.case_count) +
         0.5 * detail::signed_expectation_sum(gates, data, circuit.measured_qubit());
}

inline double utility(std::span<const double> params, const CompiledCircuit& circuit, const LabeledDataset& ds) {
  return utility(params, circuit, EncodedDataset::build(ds));
}

/// Direct projector form: sum over cases of the probability of the label's
/// outcome. Kept independent of the grouped path above.
inline double utility_projector_form(std::span<const double> params, const CompiledCircuit& circuit,
                                     const LabeledDataset& ds) {
  detail::check_width(circuit, ds.encoding.qubits());
  double acc = 0;
  for (const auto& c : ds.cases) {
    const auto out = apply_circuit(circuit, params, encode(ds.encoding, c.gram));
    acc += qsim::outcome_probability(out, circuit.measured_qubit(), c.label ? -1 : 1);
  }
  return acc;
}

/// p(next bit = 1 | gram).
inline double forecast_probability(std::span<const double> params, const CompiledCircuit& circuit, const DGram& gram,
                                   const EncodingSpec& encoding) {
  detail::check_width(circuit, encoding.qubits());
  const auto out = apply_circuit(circuit, params, encode(encoding, gram));
  return qsim::outcome_probability(out, circuit.measured_qubit(), -1);
}

// ---------------------------------------------------------------------------
// Analytic gradient

/// Gradient of <U psi | Z_m | U psi> with respect to every parameter, built
/// from Hadamard-test overlaps:
///
///   d<Z>/d eta_j = 2 Re <U_1 .. dU_j .. U_L psi | Z_m | U psi>.
///
/// For a rotation R(a) = exp(-i a P), dR/da = R(a + pi/2). For a controlled
/// rotation, dU/da = (1/2)(I x dV - Z_c x dV) with dV = R(a + pi/2) on the
/// target; Z_c = i R_Z(pi/2) on the control, so the second branch contributes
/// Im of a unitary overlap. Tied parameters sum over their occurrences.
inline std::vector<double> expectation_gradient(std::span<const double> params, const CompiledCircuit& circuit,
                                                const qsim::QuantumState& psi,
                                                const qsim::HadamardMode& mode = qsim::Analytic{}) {
  detail::check_width(circuit, psi.qubits());
  const auto gates = circuit.bind(params);
  const qsim::Observable obs{circuit.measured_qubit()};
  const double half_pi = std::numbers::pi / 2;
  std::vector<double> grad(circuit.parameter_count(), 0.0);
  std::vector<qsim::Gate> left;
  left.reserve(gates.size() + 1);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    double d = 0;
    left.assign(gates.begin(), gates.begin() + static_cast<std::ptrdiff_t>(i));
    if (g.kind == qsim::GateKind::pauli_rotation) {
      left.push_back(qsim::Gate::rotation(g.axis, g.angle + half_pi, g.target));
      left.insert(left.end(), gates.begin() + static_cast<std::ptrdiff_t>(i) + 1, gates.end());
      d = 2.0 * qsim::hadamard_test(psi, left, gates, obs, mode, qsim::OverlapPart::real);
    } else {
      // Branch I x dV.
      left.push_back(qsim::Gate::rotation(g.axis, g.angle + half_pi, g.target));
      left.insert(left.end(), gates.begin() + static_cast<std::ptrdiff_t>(i) + 1, gates.end());
      const double re1 = qsim::hadamard_test(psi, left, gates, obs, mode, qsim::OverlapPart::real);
      // Branch Z_c x dV, with Z_c replaced by R_Z(pi/2) up to the phase i.
      left.assign(gates.begin(), gates.begin() + static_cast<std::ptrdiff_t>(i));
      left.push_back(qsim::Gate::rotation(qsim::Pauli::Z, half_pi, *g.control));
      left.push_back(qsim::Gate::rotation(g.axis, g.angle + half_pi, g.target));
      left.insert(left.end(), gates.begin() + static_cast<std::ptrdiff_t>(i) + 1, gates.end());
      const double im2 = qsim::hadamard_test(psi, left, gates, obs, mode, qsim::OverlapPart::imaginary);
      // 2 * 1/2 * (Re z1 - Re(-i z2')) = Re z1 - Im z2'
      d = re1 - im2;
    }
    grad[circuit.gates()[i].param] += d;
  }
  return grad;
}

/// dL/dtheta over a dataset (or minibatch).
inline std::vector<double> gradient(std::span<const double> params, const CompiledCircuit& circuit,
                                    const EncodedDataset& data) {
  detail::check_width(circuit, data.qubits);
  std::vector<double> grad(circuit.parameter_count(), 0.0);
  for (std::size_t g = 0; g < data.states.size(); ++g) {
    if (data.weights[g] == 0.0) continue;
    const auto eg = expectation_gradient(params, circuit, data.states[g]);
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += 0.5 * data.weights[g] * eg[j];
  }
  return grad;
}

inline std::vector<double> gradient(std::span<const double> params, const CompiledCircuit& circuit,
                                    const LabeledDataset& batch) {
  return gradient(params, circuit, EncodedDataset::build(batch));
}

// ---------------------------------------------------------------------------
// Training configuration and results

enum class TrainMethod { sgd, coordinate_ascent };

inline std::string_view to_string(TrainMethod m) { return m == TrainMethod::sgd ? "sgd" : "coordinate_ascent"; }

inline TrainMethod parse_train_method(std::string_view s) {
  if (s == "sgd") return TrainMethod::sgd;
  if (s == "coordinate_ascent" || s == "ca") return TrainMethod::coordinate_ascent;
  throw std::invalid_argument("unknown training method '" + std::string(s) + "'");
}

inline constexpr std::size_t kDefaultSgdEpochs = 200;
inline constexpr std::size_t kDefaultCoordinatePasses = 50;

struct TrainConfig {
  TrainMethod method = TrainMethod::coordinate_ascent;
  double learning_rate = 0.1;
  std::size_t minibatch = 8;
  std::size_t max_epochs = 0;  // 0 selects the method default
  double tolerance = 1e-6;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;

  std::size_t epoch_cap() const {
    if (max_epochs > 0) return max_epochs;
    return method == TrainMethod::sgd ? kDefaultSgdEpochs : kDefaultCoordinatePasses;
  }

  void validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
    if (minibatch == 0) throw std::invalid_argument("minibatch size must be positive");
    if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
    if (restarts == 0) throw std::invalid_argument("restarts must be >= 1");
  }
};

struct TrainedModel {
  CircuitSpec circuit;
  EncodingSpec encoding;
  ParameterVector params;
  double utility = 0;
  std::size_t restart_index = 0;
  std::vector<double> trace;  // utility at start, then after every epoch / pass
  bool converged = false;
  std::uint64_t seed = 0;
};

inline ParameterVector random_parameters(std::size_t count, Rng& rng) {
  ParameterVector p(count);
  for (auto& x : p) x = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return p;
}

// ---------------------------------------------------------------------------
// Minibatch stochastic gradient ascent

/// theta <- theta + lr * sum_{tau in batch} (-1)^{b_tau} grad <Z_m>_tau over
/// consecutive minibatches, epoch after epoch, until the epoch cap or until an
/// epoch changes L by less than the tolerance. Returns the best parameters seen.
inline TrainedModel sgd_fit(const CompiledCircuit& circuit, const LabeledDataset& ds, const TrainConfig& config,
                            ParameterVector initial) {
  config.validate();
  circuit.check_parameters(initial);
  const EncodedDataset full = EncodedDataset::build(ds);
  detail::check_width(circuit, full.qubits);

  std::vector<EncodedDataset> batches;
  for (std::size_t start = 0; start < ds.size(); start += config.minibatch) {
    LabeledDataset b{ds.encoding, {}};
    const std::size_t end = std::min(ds.size(), start + config.minibatch);
    b.cases.assign(ds.cases.begin() + static_cast<std::ptrdiff_t>(start),
                   ds.cases.begin() + static_cast<std::ptrdiff_t>(end));
    batches.push_back(EncodedDataset::build(b));
  }

  TrainedModel model;
  model.circuit = circuit.spec();
  model.encoding = ds.encoding;
  model.seed = config.seed;
  ParameterVector theta = std::move(initial);
  double current = utility(theta, circuit, full);
  model.trace.push_back(current);
  ParameterVector best = theta;
  double best_utility = current;

  for (std::size_t epoch = 0; epoch < config.epoch_cap(); ++epoch) {
    for (const auto& batch : batches) {
      // sum (-1)^b grad<Z> is twice the batch's dL/dtheta.
      const auto g = gradient(theta, circuit, batch);
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] += config.learning_rate * 2.0 * g[j];
    }
    const double next = utility(theta, circuit, full);
    model.trace.push_back(next);
    if (next > best_utility) {
      best_utility = next;
      best = theta;
    }
    const bool settled = std::abs(next - current) < config.tolerance;
    current = next;
    if (settled) {
      model.converged = true;
      break;
    }
  }
  model.params = std::move(best);
  model.utility = utility(model.params, circuit, full);
  return model;
}

inline TrainedModel sgd_fit(const CompiledCircuit& circuit, const LabeledDataset& ds, const TrainConfig& config,
                            Rng& rng) {
  return sgd_fit(circuit, ds, config, random_parameters(circuit.parameter_count(), rng));
}

// ---------------------------------------------------------------------------
// Coordinate ascent

/// L restricted to one parameter, as a trigonometric polynomial in
/// x = omega * theta:  c + sum_n a_n cos(n x) + b_n sin(n x).
///
/// A parameter read by m plain rotations gives even frequencies only, so
/// omega = 2 and the degree is m (3 probes for m = 1). Any controlled
/// occurrence brings in odd frequencies: omega = 1, degree 2m (5 probes for
/// m = 1).
struct RestrictedObjective {
  double omega = 1;
  double c = 0;
  std::vector<double> a;  // a[n-1] multiplies cos(n x)
  std::vector<double> b;

  std::size_t degree() const noexcept { return a.size(); }

  double operator()(double theta) const {
    const double x = omega * theta;
    double f = c;
    for (std::size_t n = 1; n <= a.size(); ++n) f += a[n - 1] * std::cos(n * x) + b[n - 1] * std::sin(n * x);
    return f;
  }

  /// Global maximizer, returned in [-pi, pi).
  double argmax() const {
    double x = 0;
    if (degree() == 0) return 0;
    if (degree() == 1) {
      x = std::atan2(b[0], a[0]);
    } else {
      auto fx = [&](double t) { return (*this)(t / omega); };
      constexpr int kGrid = 1024;
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < kGrid; ++i) {
        const double t = 2 * std::numbers::pi * i / kGrid;
        const double v = fx(t);
        if (v > best) {
          best = v;
          x = t;
        }
      }
      // Newton polish on f'(x) = 0.
      for (int it = 0; it < 50; ++it) {
        double d1 = 0, d2 = 0;
        for (std::size_t n = 1; n <= a.size(); ++n) {
          const double nn = static_cast<double>(n);
          const double cs = std::cos(nn * x), sn = std::sin(nn * x);
          d1 += nn * (-a[n - 1] * sn + b[n - 1] * cs);
          d2 += -nn * nn * (a[n - 1] * cs + b[n - 1] * sn);
        }
        if (d2 >= 0) break;
        const double step = d1 / d2;
        const double candidate = x - step;
        if (fx(candidate) < best) break;
        x = candidate;
        best = fx(x);
        if (std::abs(step) < 1e-10) break;
      }
    }
    double theta = x / omega;
    theta = std::remainder(theta, 2 * std::numbers::pi);
    if (theta >= std::numbers::pi) theta -= 2 * std::numbers::pi;
    return theta;
  }
};

/// Rebuilds L(theta_j) from 2D + 1 equally spaced probes in x (exact for a
/// degree-D trigonometric polynomial).
inline RestrictedObjective fit_restricted(const CompiledCircuit& circuit, const EncodedDataset& data,
                                          std::span<const double> params, std::size_t j) {
  circuit.check_parameters(params);
  if (j >= circuit.parameter_count()) throw std::out_of_range("parameter index out of range");
  const auto occ = circuit.occurrences(j);
  bool all_plain = true;
  for (auto i : occ) all_plain = all_plain && circuit.gates()[i].kind == qsim::GateKind::pauli_rotation;
  RestrictedObjective obj;
  obj.omega = all_plain ? 2.0 : 1.0;
  const std::size_t degree = all_plain ? occ.size() : 2 * occ.size();
  const std::size_t probes = 2 * degree + 1;
  ParameterVector p(params.begin(), params.end());
  std::vector<double> f(probes), xs(probes);
  for (std::size_t i = 0; i < probes; ++i) {
    // Centered probes: 0, +step, -step, +2 step, ... (mod 2 pi in x).
    const double step = 2 * std::numbers::pi / static_cast<double>(probes);
    const long long offset = (i % 2 == 1) ? static_cast<long long>((i + 1) / 2) : -static_cast<long long>(i / 2);
    xs[i] = step * static_cast<double>(offset);
    p[j] = xs[i] / obj.omega;
    f[i] = utility(p, circuit, data);
  }
  obj.a.assign(degree, 0.0);
  obj.b.assign(degree, 0.0);
  const double inv = 1.0 / static_cast<double>(probes);
  for (std::size_t i = 0; i < probes; ++i) obj.c += f[i] * inv;
  for (std::size_t n = 1; n <= degree; ++n) {
    for (std::size_t i = 0; i < probes; ++i) {
      obj.a[n - 1] += 2 * inv * f[i] * std::cos(static_cast<double>(n) * xs[i]);
      obj.b[n - 1] += 2 * inv * f[i] * std::sin(static_cast<double>(n) * xs[i]);
    }
  }
  return obj;
}

inline constexpr double kFitResidualTolerance = 1e-8;

struct CoordinateUpdate {
  double before = 0;
  double after = 0;
  double theta = 0;
  bool moved = false;
};

/// Sets params[j] to the maximizer of the restricted objective. `current`
/// must be L(params). The update is rejected (params unchanged) if the direct
/// evaluation at the new angle falls below `current`, so L never decreases.
inline CoordinateUpdate coordinate_update(const CompiledCircuit& circuit, const EncodedDataset& data,
                                          ParameterVector& params, std::size_t j, double current) {
  CoordinateUpdate u{current, current, params[j], false};
  if (circuit.occurrences(j).empty()) return u;
  const auto obj = fit_restricted(circuit, data, params, j);
  const double residual = std::abs(obj(params[j]) - current);
  if (residual > kFitResidualTolerance)
    throw std::runtime_error("coordinate ascent: restricted fit residual " + std::to_string(residual) +
                             " at parameter " + std::to_string(j) + "; gate outside the rotation grammar");
  const double theta = obj.argmax();
  const double saved = params[j];
  params[j] = theta;
  const double next = utility(params, circuit, data);
  if (next >= current) {
    u.after = next;
    u.theta = theta;
    u.moved = true;
  } else {
    params[j] = saved;
  }
  return u;
}

inline TrainedModel coordinate_ascent_fit(const CompiledCircuit& circuit, const LabeledDataset& ds,
                                          const TrainConfig& config, ParameterVector initial) {
  config.validate();
  circuit.check_parameters(initial);
  const EncodedDataset data = EncodedDataset::build(ds);
  detail::check_width(circuit, data.qubits);

  TrainedModel model;
  model.circuit = circuit.spec();
  model.encoding = ds.encoding;
  model.seed = config.seed;
  ParameterVector theta = std::move(initial);
  double current = utility(theta, circuit, data);
  model.trace.push_back(current);
  for (std::size_t pass = 0; pass < config.epoch_cap(); ++pass) {
    const double start = current;
    for (std::size_t j = 0; j < theta.size(); ++j) current = coordinate_update(circuit, data, theta, j, current).after;
    model.trace.push_back(current);
    if (current - start < config.tolerance) {
      model.converged = true;
      break;
    }
  }
  model.params = std::move(theta);
  model.utility = utility(model.params, circuit, data);
  return model;
}

inline TrainedModel coordinate_ascent_fit(const CompiledCircuit& circuit, const LabeledDataset& ds,
                                          const TrainConfig& config, Rng& rng) {
  return coordinate_ascent_fit(circuit, ds, config, random_parameters(circuit.parameter_count(), rng));
}

/// Runs the configured fitter from `config.restarts` independent
/// Uniform[-pi, pi) initializations and keeps the highest training utility
/// (earliest restart on ties).
inline TrainedModel fit_with_restarts(const CompiledCircuit& circuit, const LabeledDataset& ds,
                                      const TrainConfig& config, Rng& rng) {
  config.validate();
  const std::uint64_t base = rng.next();
  std::optional<TrainedModel> best;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng restart_rng(derive_seed(base, {r}));
    auto init = random_parameters(circuit.parameter_count(), restart_rng);
    TrainedModel m = config.method == TrainMethod::sgd ? sgd_fit(circuit, ds, config, std::move(init))
                                                       : coordinate_ascent_fit(circuit, ds, config, std::move(init));
    m.restart_index = r;
    if (!best || m.utility > best->utility) best = std::move(m);
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Forecasting

/// S = ceil(ln(1/delta) / (2 eps^2)): Hoeffding bound on the number of shots
/// for a majority vote to pick the likelier outcome with probability >= 1 - delta
/// when the two outcome probabilities differ by 2 eps.
inline std::size_t required_samples(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("required_samples: epsilon must be positive (no forecastability)");
  if (epsilon > 0.5) throw std::invalid_argument("required_samples: epsilon must be <= 0.5");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("required_samples: delta must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log(1.0 / delta) / (2.0 * epsilon * epsilon) - 1e-12));
}

struct AnalyticThreshold {};
struct MajorityVote {
  std::size_t shots = 1;
  Rng* rng = nullptr;
};
struct BernoulliDraw {
  Rng* rng = nullptr;
};
using ForecastSampling = std::variant<AnalyticThreshold, MajorityVote, BernoulliDraw>;

inline double forecast_probability(const TrainedModel& model, const DGram& gram) {
  return forecast_probability(model.params, build_circuit(model.circuit), gram, model.encoding);
}

/// Majority of `shots` simulated measurements; a tie forecasts 0.
inline Bit majority_bit(const qsim::QuantumState& out, std::size_t measured, std::size_t shots, Rng& rng) {
  if (shots == 0) throw std::invalid_argument("majority vote needs at least one shot");
  std::size_t ones = 0;
  for (std::size_t i = 0; i < shots; ++i) ones += qsim::sample_measurement(out, measured, rng) == -1;
  return 2 * ones > shots ? 1 : 0;
}

inline Bit forecast_bit(const CompiledCircuit& circuit, std::span<const double> params, const EncodingSpec& encoding,
                        const DGram& gram, const ForecastSampling& sampling) {
  detail::check_width(circuit, encoding.qubits());
  const auto out = apply_circuit(circuit, params, encode(encoding, gram));
  if (std::holds_alternative<AnalyticThreshold>(sampling)) {
    // Exactly 0.5 forecasts 0.
    return qsim::outcome_probability(out, circuit.measured_qubit(), -1) > 0.5 ? 1 : 0;
  }
  if (const auto* mv = std::get_if<MajorityVote>(&sampling)) {
    if (mv->rng == nullptr) throw std::invalid_argument("majority sampling needs a generator");
    return majority_bit(out, circuit.measured_qubit(), mv->shots, *mv->rng);
  }
  const auto& bd = std::get<BernoulliDraw>(sampling);
  if (bd.rng == nullptr) throw std::invalid_argument("bernoulli sampling needs a generator");
  return qsim::sample_measurement(out, circuit.measured_qubit(), *bd.rng) == -1 ? 1 : 0;
}

inline Bit forecast_bit(const TrainedModel& model, const DGram& gram, const ForecastSampling& sampling) {
  return forecast_bit(build_circuit(model.circuit), model.params, model.encoding, gram, sampling);
}

// ---------------------------------------------------------------------------
// Checkpoints

inline nlohmann::json to_json(const TrainedModel& m) {
  nlohmann::json j;
  j["circuit"] = to_json(m.circuit);
  j["encoding"] = {{"method", std::string(to_string(m.encoding.method))}, {"depth", m.encoding.depth}};
  j["angles"] = m.params;
  j["utility"] = m.utility;
  j["restart_index"] = m.restart_index;
  j["trace"] = m.trace;
  j["converged"] = m.converged;
  j["seed"] = m.seed;
  return j;
}

inline TrainedModel trained_model_from_json(const nlohmann::json& j) {
  TrainedModel m;
  m.circuit = circuit_spec_from_json(j.at("circuit"));
  m.encoding.method = parse_encoding(j.at("encoding").at("method").get<std::string>());
  m.encoding.depth = j.at("encoding").at("depth").get<std::size_t>();
  m.params = j.at("angles").get<std::vector<double>>();
  m.utility = j.value("utility", 0.0);
  m.restart_index = j.value("restart_index", std::size_t{0});
  m.trace = j.value("trace", std::vector<double>{});
  m.converged = j.value("converged", false);
  m.seed = j.value("seed", std::uint64_t{0});
  build_circuit(m.circuit).check_parameters(m.params);
  return m;
}

}  // namespace bitpredict
