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

// Classical baselines: the d-gram oracle, logistic regression and small
// feed-forward networks. All of them see a d-gram as a d-dimensional 0/1
// feature vector (most recent bit first).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitpredict/bitstream.hpp"
#include "bitpredict/qtrain.hpp"
#include "bitpredict/rng.hpp"

namespace bitpredict {

// ---------------------------------------------------------------------------
// d-gram oracle

enum class OracleMode { sample, argmax };

inline std::string_view to_string(OracleMode m) { return m == OracleMode::sample ? "sample" : "argmax"; }

inline OracleMode parse_oracle_mode(std::string_view s) {
  if (s == "sample") return OracleMode::sample;
  if (s == "argmax") return OracleMode::argmax;
  throw std::invalid_argument("unknown oracle mode '" + std::string(s) + "'");
}

struct OracleModel {
  std::size_t depth = 1;
  std::size_t window_width = 0;
  CountTable table;
  double marginal_zero = 0.5;  // fallback for unseen contexts

  ConditionalCounts counts(const DGram& gram) const {
    auto it = table.find(gram.key());
    return it == table.end() ? ConditionalCounts{} : it->second;
  }
};

inline OracleModel oracle_fit(std::span<const Bit> window, std::size_t depth) {
  if (window.size() < depth + 1) throw std::invalid_argument("oracle_fit: window width must be >= d + 1");
  OracleModel m;
  m.depth = depth;
  m.window_width = window.size();
  m.table = count_table(window, depth);
  m.marginal_zero = zero_bias(window);
  return m;
}

/// Follow-on distribution for `gram`: the conditional frequencies when the
/// context was seen, otherwise the window's marginal frequencies.
inline ConditionalFrequencies oracle_distribution(const OracleModel& m, const DGram& gram) {
  if (gram.depth() != m.depth) throw std::invalid_argument("oracle: gram depth mismatch");
  if (auto f = conditional_frequencies(m.counts(gram))) return *f;
  return ConditionalFrequencies{m.marginal_zero, 1.0 - m.marginal_zero};
}

/// argmax breaks ties toward 0.
inline Bit oracle_forecast(const OracleModel& m, const DGram& gram, OracleMode mode, Rng& rng) {
  const auto f = oracle_distribution(m, gram);
  if (mode == OracleMode::argmax) return f.p1 > f.p0 ? 1 : 0;
  return rng.uniform() < f.p1 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticConfig {
  double step = 0;  // 0 picks 4 / (d + 1), the inverse Lipschitz constant of the loss gradient
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-6;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Keeps forecasts strictly inside (0, 1).
inline double clamp_probability(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

inline double logistic_margin(const LogisticModel& m, std::span<const Bit> x) {
  double z = m.bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += m.weights[i] * x[i];
  return z;
}
}  // namespace detail

inline double logistic_forecast(const LogisticModel& m, const DGram& gram) {
  if (gram.depth() != m.weights.size()) throw std::invalid_argument("logistic: gram depth mismatch");
  return detail::clamp_probability(detail::sigmoid(detail::logistic_margin(m, gram.bits())));
}

/// Mean negative log-likelihood.
inline double logistic_loss(const LogisticModel& m, const LabeledDataset& ds) {
  double loss = 0;
  for (const auto& c : ds.cases) {
    const double z = detail::logistic_margin(m, c.gram.bits());
    // log(1 + e^z) - y z, stable
    loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - (c.label ? z : 0.0);
  }
  return loss / static_cast<double>(ds.size());
}

/// Full-batch gradient ascent on the mean log-likelihood.
inline LogisticModel logistic_fit(const LabeledDataset& ds, const LogisticConfig& config = {}) {
  if (ds.cases.empty()) throw std::invalid_argument("logistic_fit: empty dataset");
  const std::size_t d = ds.encoding.depth;
  const double step = config.step > 0 ? config.step : 4.0 / static_cast<double>(d + 1);
  const double n = static_cast<double>(ds.size());
  LogisticModel m;
  m.weights.assign(d, 0.0);
  std::vector<double> gw(d);
  for (m.iterations = 0; m.iterations < config.max_iterations; ++m.iterations) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0;
    for (const auto& c : ds.cases) {
      const double r = static_cast<double>(c.label) - detail::sigmoid(detail::logistic_margin(m, c.gram.bits()));
      for (std::size_t i = 0; i < d; ++i) gw[i] += r * c.gram[i];
      gb += r;
    }
    double norm2 = gb * gb;
    for (double g : gw) norm2 += g * g;
    if (std::sqrt(norm2) / n < config.gradient_tolerance) {
      m.converged = true;
      break;
    }
    for (std::size_t i = 0; i < d; ++i) m.weights[i] += step * gw[i] / n;
    m.bias += step * gb / n;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Feed-forward networks

enum class HiddenLayout { d, dd, ddd, f, ff, fff };
enum class Activation { relu, tanh, logit, selu, softmax };

inline std::string_view to_string(HiddenLayout h) {
  switch (h) {
    case HiddenLayout::d: return "d";
    case HiddenLayout::dd: return "dd";
    case HiddenLayout::ddd: return "ddd";
    case HiddenLayout::f: return "f";
    case HiddenLayout::ff: return "ff";
    case HiddenLayout::fff: return "fff";
  }
  return "d";
}

inline HiddenLayout parse_hidden_layout(std::string_view s) {
  for (auto h : {HiddenLayout::d, HiddenLayout::dd, HiddenLayout::ddd, HiddenLayout::f, HiddenLayout::ff,
                 HiddenLayout::fff})
    if (to_string(h) == s) return h;
  throw std::invalid_argument("unknown hidden layout '" + std::string(s) + "' (expected d, dd, ddd, f, ff or fff)");
}

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::logit: return "logit";
    case Activation::selu: return "selu";
    case Activation::softmax: return "softmax";
  }
  return "tanh";
}

inline Activation parse_activation(std::string_view s) {
  for (auto a : {Activation::relu, Activation::tanh, Activation::logit, Activation::selu, Activation::softmax})
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

/// Hidden layer widths; f = floor(2d/3), raised to 1 when d = 1.
inline std::vector<std::size_t> hidden_sizes(HiddenLayout layout, std::size_t d) {
  const std::size_t f = std::max<std::size_t>(1, (2 * d) / 3);
  switch (layout) {
    case HiddenLayout::d: return {d};
    case HiddenLayout::dd: return {d, d};
    case HiddenLayout::ddd: return {d, d, d};
    case HiddenLayout::f: return {f};
    case HiddenLayout::ff: return {f, f};
    case HiddenLayout::fff: return {f, f, f};
  }
  return {d};
}

struct MlpConfig {
  double learning_rate = 0.5;
  std::size_t batch = 8;
  std::size_t epochs = 400;
  std::uint64_t seed = 0;
};

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w;  // row-major out x in
  std::vector<double> b;
};

struct MlpModel {
  std::size_t depth = 0;
  HiddenLayout layout = HiddenLayout::dd;
  Activation activation = Activation::tanh;
  std::vector<DenseLayer> layers;  // hidden layers, then the sigmoid output unit
};

namespace detail {

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

inline void activate(Activation act, std::span<const double> z, std::span<double> a) {
  switch (act) {
    case Activation::relu:
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0 ? z[i] : 0.0;
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::tanh(z[i]);
      break;
    case Activation::logit:
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = sigmoid(z[i]);
      break;
    case Activation::selu:
      for (std::size_t i = 0; i < z.size(); ++i)
        a[i] = z[i] > 0 ? kSeluLambda * z[i] : kSeluLambda * kSeluAlpha * std::expm1(z[i]);
      break;
    case Activation::softmax: {
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0;
      for (std::size_t i = 0; i < z.size(); ++i) sum += (a[i] = std::exp(z[i] - mx));
      for (std::size_t i = 0; i < z.size(); ++i) a[i] /= sum;
      break;
    }
  }
}

/// dLoss/dz from dLoss/da for one layer.
inline void activation_backward(Activation act, std::span<const double> z, std::span<const double> a,
                                std::span<const double> da, std::span<double> dz) {
  switch (act) {
    case Activation::relu:
      for (std::size_t i = 0; i < z.size(); ++i) dz[i] = z[i] > 0 ? da[i] : 0.0;
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < z.size(); ++i) dz[i] = da[i] * (1 - a[i] * a[i]);
      break;
    case Activation::logit:
      for (std::size_t i = 0; i < z.size(); ++i) dz[i] = da[i] * a[i] * (1 - a[i]);
      break;
    case Activation::selu:
      for (std::size_t i = 0; i < z.size(); ++i)
        dz[i] = da[i] * (z[i] > 0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z[i]));
      break;
    case Activation::softmax: {
      double dot = 0;
      for (std::size_t i = 0; i < z.size(); ++i) dot += a[i] * da[i];
      for (std::size_t i = 0; i < z.size(); ++i) dz[i] = a[i] * (da[i] - dot);
      break;
    }
  }
}

struct MlpTape {
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> a;  // a[0] is the input
};

inline double mlp_forward(const MlpModel& m, std::span<const Bit> x, MlpTape& tape) {
  const std::size_t nl = m.layers.size();
  tape.z.resize(nl);
  tape.a.resize(nl + 1);
  tape.a[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < nl; ++l) {
    const auto& L = m.layers[l];
    tape.z[l].assign(L.out, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      double s = L.b[o];
      for (std::size_t i = 0; i < L.in; ++i) s += L.w[o * L.in + i] * tape.a[l][i];
      tape.z[l][o] = s;
    }
    tape.a[l + 1].assign(L.out, 0.0);
    if (l + 1 == nl) {
      tape.a[l + 1][0] = sigmoid(tape.z[l][0]);
    } else {
      activate(m.activation, tape.z[l], tape.a[l + 1]);
    }
  }
  return tape.a[nl][0];
}

}  // namespace detail

inline double mlp_forecast(const MlpModel& m, const DGram& gram) {
  if (gram.depth() != m.depth) throw std::invalid_argument("mlp: gram depth mismatch");
  detail::MlpTape tape;
  return detail::clamp_probability(detail::mlp_forward(m, gram.bits(), tape));
}

/// Minibatch gradient descent on binary cross-entropy. Weights start from a
/// seeded Xavier-uniform draw; biases start at zero.
inline MlpModel mlp_fit(const LabeledDataset& ds, HiddenLayout layout, Activation activation,
                        const MlpConfig& config) {
  if (ds.cases.empty()) throw std::invalid_argument("mlp_fit: empty dataset");
  if (config.batch == 0 || !(config.learning_rate > 0)) throw std::invalid_argument("mlp_fit: bad config");
  const std::size_t d = ds.encoding.depth;
  MlpModel m;
  m.depth = d;
  m.layout = layout;
  m.activation = activation;
  Rng rng(config.seed);
  std::size_t in = d;
  auto widths = hidden_sizes(layout, d);
  widths.push_back(1);
  for (std::size_t out : widths) {
    DenseLayer L{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (auto& w : L.w) w = rng.uniform(-limit, limit);
    m.layers.push_back(std::move(L));
    in = out;
  }

  const std::size_t nl = m.layers.size();
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<DenseLayer> grad = m.layers;
  detail::MlpTape tape;
  std::vector<std::vector<double>> delta(nl);
  std::vector<double> da;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      for (auto& g : grad) {
        std::fill(g.w.begin(), g.w.end(), 0.0);
        std::fill(g.b.begin(), g.b.end(), 0.0);
      }
      for (std::size_t idx = start; idx < end; ++idx) {
        const auto& c = ds.cases[order[idx]];
        const double p = detail::mlp_forward(m, c.gram.bits(), tape);
        delta[nl - 1].assign(1, p - static_cast<double>(c.label));
        for (std::size_t l = nl; l-- > 0;) {
          const auto& L = m.layers[l];
          auto& G = grad[l];
          for (std::size_t o = 0; o < L.out; ++o) {
            G.b[o] += delta[l][o];
            for (std::size_t i = 0; i < L.in; ++i) G.w[o * L.in + i] += delta[l][o] * tape.a[l][i];
          }
          if (l == 0) break;
          da.assign(L.in, 0.0);
          for (std::size_t o = 0; o < L.out; ++o)
            for (std::size_t i = 0; i < L.in; ++i) da[i] += L.w[o * L.in + i] * delta[l][o];
          delta[l - 1].assign(L.in, 0.0);
          detail::activation_backward(m.activation, tape.z[l - 1], tape.a[l], da, delta[l - 1]);
        }
      }
      const double scale = config.learning_rate / static_cast<double>(end - start);
      for (std::size_t l = 0; l < nl; ++l) {
        for (std::size_t i = 0; i < m.layers[l].w.size(); ++i) m.layers[l].w[i] -= scale * grad[l].w[i];
        for (std::size_t i = 0; i < m.layers[l].b.size(); ++i) m.layers[l].b[i] -= scale * grad[l].b[i];
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Checkpoints

inline nlohmann::json to_json(const OracleModel& m) {
  nlohmann::json table = nlohmann::json::array();
  std::vector<std::uint64_t> keys;
  for (const auto& [k, _] : m.table) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (auto k : keys) {
    const auto gram = DGram::from_key(k, m.depth);
    std::string s;
    for (Bit b : gram.bits()) s.push_back(static_cast<char>('0' + b));
    table.push_back({{"gram", s}, {"c0", m.table.at(k).c0}, {"c1", m.table.at(k).c1}});
  }
  return {{"type", "oracle"}, {"depth", m.depth}, {"window_width", m.window_width},
          {"marginal_zero", m.marginal_zero}, {"counts", table}};
}

inline nlohmann::json to_json(const LogisticModel& m) {
  return {{"type", "logistic"}, {"weights", m.weights}, {"bias", m.bias}, {"iterations", m.iterations},
          {"converged", m.converged}};
}

inline nlohmann::json to_json(const MlpModel& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& L : m.layers) layers.push_back({{"in", L.in}, {"out", L.out}, {"w", L.w}, {"b", L.b}});
  return {{"type", "mlp"},
          {"depth", m.depth},
          {"hidden", std::string(to_string(m.layout))},
          {"activation", std::string(to_string(m.activation))},
          {"layers", layers}};
}

}  // namespace bitpredict
