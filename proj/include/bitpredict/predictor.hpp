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

// A uniform predictor contract over the quantum classifiers and the
// classical baselines: fit on a window of bits, forecast the next bit from a
// d-gram. Specs round-trip through JSON so experiments and game sessions can
// be configured from files.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitpredict/baselines.hpp"
#include "bitpredict/bitstream.hpp"
#include "bitpredict/circuits.hpp"
#include "bitpredict/encoder.hpp"
#include "bitpredict/qtrain.hpp"
#include "bitpredict/rng.hpp"

namespace bitpredict {

enum class ForecastMode { threshold, majority, bernoulli };

inline std::string_view to_string(ForecastMode m) {
  switch (m) {
    case ForecastMode::threshold: return "threshold";
    case ForecastMode::majority: return "majority";
    case ForecastMode::bernoulli: return "bernoulli";
  }
  return "threshold";
}

inline ForecastMode parse_forecast_mode(std::string_view s) {
  if (s == "threshold") return ForecastMode::threshold;
  if (s == "majority") return ForecastMode::majority;
  if (s == "bernoulli") return ForecastMode::bernoulli;
  throw std::invalid_argument("unknown forecast mode '" + std::string(s) + "'");
}

struct QuantumSpec {
  CircuitSpec circuit;
  EncodingMethod encoding = EncodingMethod::amplitude;
  TrainConfig train;  // train.seed is ignored; fit() supplies the seed
  ForecastMode forecast = ForecastMode::threshold;
  std::size_t shots = 101;  // majority mode only
};

struct OracleSpec {
  OracleMode mode = OracleMode::argmax;
};

struct LogisticSpec {
  LogisticConfig config;
};

struct MlpSpec {
  HiddenLayout layout = HiddenLayout::dd;
  Activation activation = Activation::tanh;
  MlpConfig config;  // config.seed is ignored; fit() supplies the seed
};

struct PredictorSpec {
  std::string name = "QC";
  std::size_t depth = 3;
  std::variant<QuantumSpec, OracleSpec, LogisticSpec, MlpSpec> method;

  std::string_view type() const {
    switch (method.index()) {
      case 0: return "quantum";
      case 1: return "oracle";
      case 2: return "logistic";
      default: return "mlp";
    }
  }

  void validate() const {
    if (depth < 1) throw std::invalid_argument("predictor depth must be >= 1");
    if (const auto* q = std::get_if<QuantumSpec>(&method)) {
      const EncodingSpec enc{q->encoding, depth};
      enc.validate();
      q->train.validate();
      if (q->circuit.family == CircuitFamily::custom) throw std::invalid_argument("custom circuits cannot be specified");
      if (q->circuit.family == CircuitFamily::polar) q->circuit.geometry.validate();
      if (q->circuit.qubits() != enc.qubits())
        throw std::invalid_argument("circuit has " + std::to_string(q->circuit.qubits()) + " qubits but the " +
                                    std::string(to_string(q->encoding)) + " encoding of depth " +
                                    std::to_string(depth) + " needs " + std::to_string(enc.qubits()));
      if (q->forecast == ForecastMode::majority && q->shots == 0)
        throw std::invalid_argument("majority forecasting needs shots >= 1");
    }
  }
};

/// A fitted predictor. Forecast randomness (oracle sampling, measurement
/// shots) is drawn from the generator passed to forecast().
class Predictor {
 public:
  using Model = std::variant<TrainedModel, OracleModel, LogisticModel, MlpModel>;

  static Predictor fit(const PredictorSpec& spec, std::span<const Bit> window, std::uint64_t seed) {
    spec.validate();
    Predictor p;
    p.spec_ = spec;
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, QuantumSpec>) {
            const EncodingSpec enc{m.encoding, spec.depth};
            const auto ds = LabeledDataset::from_window(window, enc);
            TrainConfig cfg = m.train;
            cfg.seed = seed;
            Rng rng(seed);
            p.circuit_ = build_circuit(m.circuit);
            TrainedModel model = fit_with_restarts(p.circuit_, ds, cfg, rng);
            model.circuit = m.circuit;
            model.encoding = enc;
            model.seed = seed;
            p.model_ = std::move(model);
          } else if constexpr (std::is_same_v<T, OracleSpec>) {
            p.model_ = oracle_fit(window, spec.depth);
          } else if constexpr (std::is_same_v<T, LogisticSpec>) {
            const auto ds = LabeledDataset::from_window(window, EncodingSpec{EncodingMethod::qubit, spec.depth});
            p.model_ = logistic_fit(ds, m.config);
          } else {
            const auto ds = LabeledDataset::from_window(window, EncodingSpec{EncodingMethod::qubit, spec.depth});
            MlpConfig cfg = m.config;
            cfg.seed = seed;
            p.model_ = mlp_fit(ds, m.layout, m.activation, cfg);
          }
        },
        spec.method);
    p.training_score_ = p.accuracy(window);
    return p;
  }

  const PredictorSpec& spec() const noexcept { return spec_; }
  const Model& model() const noexcept { return model_; }
  std::size_t depth() const noexcept { return spec_.depth; }

  /// Fraction of the window's own cases the deterministic forecast gets right.
  double training_score() const noexcept { return training_score_; }

  /// Probability that the next bit is 1.
  double probability_one(const DGram& gram) const {
    if (gram.depth() != spec_.depth) throw std::invalid_argument("predictor: gram depth mismatch");
    switch (model_.index()) {
      case 0: {
        const auto& m = std::get<TrainedModel>(model_);
        return forecast_probability(m.params, circuit_, gram, m.encoding);
      }
      case 1: return oracle_distribution(std::get<OracleModel>(model_), gram).p1;
      case 2: return logistic_forecast(std::get<LogisticModel>(model_), gram);
      default: return mlp_forecast(std::get<MlpModel>(model_), gram);
    }
  }

  Bit forecast(const DGram& gram, Rng& rng) const {
    if (const auto* m = std::get_if<TrainedModel>(&model_)) {
      const auto& q = std::get<QuantumSpec>(spec_.method);
      switch (q.forecast) {
        case ForecastMode::threshold: return forecast_bit(circuit_, m->params, m->encoding, gram, AnalyticThreshold{});
        case ForecastMode::majority:
          return forecast_bit(circuit_, m->params, m->encoding, gram, MajorityVote{q.shots, &rng});
        case ForecastMode::bernoulli: return forecast_bit(circuit_, m->params, m->encoding, gram, BernoulliDraw{&rng});
      }
    }
    if (const auto* m = std::get_if<OracleModel>(&model_))
      return oracle_forecast(*m, gram, std::get<OracleSpec>(spec_.method).mode, rng);
    return probability_one(gram) > 0.5 ? 1 : 0;
  }

  nlohmann::json checkpoint() const {
    nlohmann::json j = std::visit([](const auto& m) { return to_json(m); }, model_);
    j["name"] = spec_.name;
    j["training_score"] = training_score_;
    return j;
  }

 private:
  double accuracy(std::span<const Bit> window) const {
    const std::size_t d = spec_.depth;
    std::size_t correct = 0;
    for (std::size_t t = d; t < window.size(); ++t) {
      const Bit guess = probability_one(DGram::at(window, t, d)) > 0.5 ? 1 : 0;
      correct += guess == window[t];
    }
    return static_cast<double>(correct) / static_cast<double>(window.size() - d);
  }

  PredictorSpec spec_;
  Model model_;
  CompiledCircuit circuit_;
  double training_score_ = 0;
};

/// Fits every alternative and keeps the one with the highest training score
/// (earliest on ties). Each alternative sees the same seed.
inline Predictor fit_best(std::span<const PredictorSpec> alternatives, std::span<const Bit> window,
                          std::uint64_t seed) {
  if (alternatives.empty()) throw std::invalid_argument("fit_best: no predictor alternatives");
  std::optional<Predictor> best;
  for (const auto& spec : alternatives) {
    Predictor p = Predictor::fit(spec, window, seed);
    if (!best || p.training_score() > best->training_score()) best = std::move(p);
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const PredictorSpec& spec) {
  nlohmann::json j{{"name", spec.name}, {"type", std::string(spec.type())}, {"depth", spec.depth}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, QuantumSpec>) {
          j["circuit"] = to_json(m.circuit);
          j["encoding"] = std::string(to_string(m.encoding));
          j["method"] = std::string(to_string(m.train.method));
          j["learning_rate"] = m.train.learning_rate;
          j["minibatch"] = m.train.minibatch;
          j["max_epochs"] = m.train.max_epochs;
          j["tolerance"] = m.train.tolerance;
          j["restarts"] = m.train.restarts;
          j["forecast"] = std::string(to_string(m.forecast));
          j["shots"] = m.shots;
        } else if constexpr (std::is_same_v<T, OracleSpec>) {
          j["mode"] = std::string(to_string(m.mode));
        } else if constexpr (std::is_same_v<T, LogisticSpec>) {
          j["step"] = m.config.step;
          j["max_iterations"] = m.config.max_iterations;
          j["gradient_tolerance"] = m.config.gradient_tolerance;
        } else {
          j["hidden"] = std::string(to_string(m.layout));
          j["activation"] = std::string(to_string(m.activation));
          j["learning_rate"] = m.config.learning_rate;
          j["batch"] = m.config.batch;
          j["epochs"] = m.config.epochs;
        }
      },
      spec.method);
  return j;
}

inline PredictorSpec predictor_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("predictor spec must be a JSON object");
  PredictorSpec spec;
  const std::string type = j.value("type", "quantum");
  spec.depth = j.value("depth", std::size_t{3});
  if (type == "quantum") {
    QuantumSpec q;
    if (j.contains("circuit")) q.circuit = circuit_spec_from_json(j.at("circuit"));
    q.encoding = parse_encoding(j.value("encoding", "amplitude"));
    q.train.method = parse_train_method(j.value("method", "coordinate_ascent"));
    q.train.learning_rate = j.value("learning_rate", q.train.learning_rate);
    q.train.minibatch = j.value("minibatch", q.train.minibatch);
    q.train.max_epochs = j.value("max_epochs", q.train.max_epochs);
    q.train.tolerance = j.value("tolerance", q.train.tolerance);
    q.train.restarts = j.value("restarts", q.train.restarts);
    q.forecast = parse_forecast_mode(j.value("forecast", "threshold"));
    q.shots = j.value("shots", q.shots);
    spec.method = q;
    spec.name = "QC";
  } else if (type == "oracle") {
    spec.method = OracleSpec{parse_oracle_mode(j.value("mode", "argmax"))};
    spec.name = "oracle";
  } else if (type == "logistic") {
    LogisticSpec l;
    l.config.step = j.value("step", l.config.step);
    l.config.max_iterations = j.value("max_iterations", l.config.max_iterations);
    l.config.gradient_tolerance = j.value("gradient_tolerance", l.config.gradient_tolerance);
    spec.method = l;
    spec.name = "LR";
  } else if (type == "mlp") {
    MlpSpec m;
    m.layout = parse_hidden_layout(j.value("hidden", "dd"));
    m.activation = parse_activation(j.value("activation", "tanh"));
    m.config.learning_rate = j.value("learning_rate", m.config.learning_rate);
    m.config.batch = j.value("batch", m.config.batch);
    m.config.epochs = j.value("epochs", m.config.epochs);
    spec.method = m;
    spec.name = "NN";
  } else {
    throw std::invalid_argument("unknown predictor type '" + type + "'");
  }
  spec.name = j.value("name", spec.name);
  spec.validate();
  return spec;
}

}  // namespace bitpredict
