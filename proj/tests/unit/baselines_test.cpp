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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bitpredict/baselines.hpp"
#include "bitpredict/predictor.hpp"

namespace bitpredict {
namespace {

std::vector<Bit> bits_of(std::string_view s) {
  std::vector<Bit> v;
  for (char c : s) v.push_back(c == '1');
  return v;
}

std::vector<Bit> random_bits(std::size_t n, Rng& rng, double p_one = 0.5) {
  std::vector<Bit> v(n);
  for (auto& b : v) b = rng.bernoulli(p_one) ? 1 : 0;
  return v;
}

// Dataset over every d-gram, `reps` copies each, labelled by `rule`.
template <class Rule>
LabeledDataset exhaustive(std::size_t d, int reps, Rule rule) {
  LabeledDataset ds{{EncodingMethod::qubit, d}, {}};
  for (std::uint64_t key = 0; key < (1u << d); ++key) {
    const auto g = DGram::from_key(key, d);
    for (int r = 0; r < reps; ++r) ds.cases.push_back({g, static_cast<Bit>(rule(g))});
  }
  return ds;
}

template <class Model, class Prob>
double dataset_accuracy(const Model& m, const LabeledDataset& ds, Prob prob) {
  std::size_t hits = 0;
  for (const auto& c : ds.cases) hits += (prob(m, c.gram) > 0.5 ? 1 : 0) == c.label;
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

// ---------------------------------------------------------------------------
// Sampling oracle

TEST(Oracle, ConditionalDistributionFromCounts) {
  // "1" at positions 1, 3, 4 is followed by 0, 1, 0 -> p1 = 1/3.
  const auto w = bits_of("0101100");
  const auto m = oracle_fit(w, 1);
  const auto f = oracle_distribution(m, DGram{1});
  EXPECT_DOUBLE_EQ(f.p1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.p0, 2.0 / 3.0);
  Rng rng(1);
  EXPECT_EQ(oracle_forecast(m, DGram{1}, OracleMode::argmax, rng), 0);
  // "0" at positions 0, 2, 5 is followed by 1, 1, 0.
  EXPECT_EQ(oracle_forecast(m, DGram{0}, OracleMode::argmax, rng), 1);
  EXPECT_THROW(oracle_distribution(m, DGram{1, 0}), std::invalid_argument);
}

TEST(Oracle, UnseenContextFallsBackToMarginal) {
  const auto w = bits_of("0000001");  // "1" only at the end: never a context
  const auto m = oracle_fit(w, 1);
  const auto f = oracle_distribution(m, DGram{1});
  EXPECT_DOUBLE_EQ(f.p0, 6.0 / 7.0);
  Rng rng(2);
  EXPECT_EQ(oracle_forecast(m, DGram{1}, OracleMode::argmax, rng), 0);
}

TEST(Oracle, ArgmaxTieForecastsZero) {
  const auto m = oracle_fit(bits_of("0100"), 1);  // after 0: one 1, one 0
  Rng rng(3);
  EXPECT_DOUBLE_EQ(oracle_distribution(m, DGram{0}).p1, 0.5);
  EXPECT_EQ(oracle_forecast(m, DGram{0}, OracleMode::argmax, rng), 0);
}

TEST(Oracle, SamplingFrequencyMatchesConditional) {
  Rng data(4);
  const auto w = random_bits(125, data, 0.7);
  const auto m = oracle_fit(w, 2);
  Rng rng(5);
  for (std::uint64_t key = 0; key < 4; ++key) {
    const auto g = DGram::from_key(key, 2);
    const double p1 = oracle_distribution(m, g).p1;
    int ones = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ones += oracle_forecast(m, g, OracleMode::sample, rng);
    EXPECT_NEAR(ones / static_cast<double>(n), p1, 4 * std::sqrt(0.25 / n));
  }
}

TEST(Oracle, ParseAndJson) {
  EXPECT_EQ(parse_oracle_mode("sample"), OracleMode::sample);
  EXPECT_THROW(parse_oracle_mode("mode"), std::invalid_argument);
  const auto j = to_json(oracle_fit(bits_of("0110100"), 2));
  EXPECT_EQ(j.at("depth"), 2);
}

// ---------------------------------------------------------------------------
// Logistic regression

TEST(Logistic, AllOnesIsConfident) {
  const auto ds = exhaustive(3, 4, [](const DGram&) { return 1; });
  const auto m = logistic_fit(ds);
  for (std::uint64_t key = 0; key < 8; ++key) EXPECT_GT(logistic_forecast(m, DGram::from_key(key, 3)), 0.99);
}

TEST(Logistic, CopyRuleIsLearned) {
  const auto ds = exhaustive(3, 4, [](const DGram& g) { return g[1]; });
  const auto m = logistic_fit(ds);
  EXPECT_EQ(dataset_accuracy(m, ds, [](const auto& mm, const DGram& g) { return logistic_forecast(mm, g); }), 1.0);
}

TEST(Logistic, XorIsNotLinearlySeparable) {
  const auto ds = exhaustive(2, 5, [](const DGram& g) { return g[0] ^ g[1]; });
  const auto m = logistic_fit(ds);
  // The loss minimizer is the zero model: every probability is 1/2.
  for (std::uint64_t key = 0; key < 4; ++key) EXPECT_NEAR(logistic_forecast(m, DGram::from_key(key, 2)), 0.5, 1e-3);
  EXPECT_NEAR(logistic_loss(m, ds), std::log(2.0), 1e-5);
}

TEST(Logistic, LossNeverIncreasesWithMoreIterations) {
  Rng rng(6);
  const auto ds = LabeledDataset::from_window(random_bits(125, rng, 0.65), {EncodingMethod::qubit, 4});
  double prev = std::log(2.0) + 1e-12;  // zero model
  for (std::size_t it : {1, 2, 5, 10, 50, 200, 1000}) {
    LogisticConfig cfg;
    cfg.max_iterations = it;
    cfg.gradient_tolerance = 1e-14;
    const double loss = logistic_loss(logistic_fit(ds, cfg), ds);
    EXPECT_LE(loss, prev + 1e-12) << it;
    prev = loss;
  }
}

TEST(Logistic, ProbabilitiesStayInOpenInterval) {
  const auto ds = exhaustive(4, 50, [](const DGram& g) { return g[0]; });
  LogisticConfig cfg;
  cfg.max_iterations = 100000;
  const auto m = logistic_fit(ds, cfg);
  for (std::uint64_t key = 0; key < 16; ++key) {
    const double p = logistic_forecast(m, DGram::from_key(key, 4));
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
  EXPECT_TRUE(std::isfinite(logistic_loss(m, ds)));
}

// ---------------------------------------------------------------------------
// Feed-forward network

TEST(Mlp, HiddenSizes) {
  EXPECT_EQ(hidden_sizes(HiddenLayout::d, 3), (std::vector<std::size_t>{3}));
  EXPECT_EQ(hidden_sizes(HiddenLayout::ddd, 4), (std::vector<std::size_t>{4, 4, 4}));
  EXPECT_EQ(hidden_sizes(HiddenLayout::ff, 6), (std::vector<std::size_t>{4, 4}));
  EXPECT_EQ(hidden_sizes(HiddenLayout::f, 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(parse_hidden_layout("fff"), HiddenLayout::fff);
  EXPECT_EQ(parse_activation("selu"), Activation::selu);
  EXPECT_THROW(parse_activation("gelu"), std::invalid_argument);
  EXPECT_THROW(parse_hidden_layout("dddd"), std::invalid_argument);
}

TEST(Mlp, LearnsXorWithTwoTanhLayers) {
  // Two-unit layers have XOR local minima; most initializations escape them.
  const auto ds = exhaustive(2, 8, [](const DGram& g) { return g[0] ^ g[1]; });
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MlpConfig cfg;
    cfg.epochs = 1500;
    cfg.seed = seed;
    const auto m = mlp_fit(ds, HiddenLayout::dd, Activation::tanh, cfg);
    solved += dataset_accuracy(m, ds, [](const auto& mm, const DGram& g) { return mlp_forecast(mm, g); }) == 1.0;
  }
  EXPECT_GE(solved, 6);
}

TEST(Mlp, LearnsCopyRuleForEveryActivation) {
  const auto ds = exhaustive(3, 4, [](const DGram& g) { return g[2]; });
  for (auto act : {Activation::relu, Activation::tanh, Activation::logit, Activation::selu, Activation::softmax}) {
    MlpConfig cfg;
    cfg.seed = 8;
    cfg.epochs = 600;
    const auto m = mlp_fit(ds, HiddenLayout::d, act, cfg);
    EXPECT_GE(dataset_accuracy(m, ds, [](const auto& mm, const DGram& g) { return mlp_forecast(mm, g); }), 0.99)
        << to_string(act);
    for (std::uint64_t key = 0; key < 8; ++key) {
      const double p = mlp_forecast(m, DGram::from_key(key, 3));
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
    }
  }
}

TEST(Mlp, SeedDeterminesModel) {
  Rng rng(9);
  const auto ds = LabeledDataset::from_window(random_bits(80, rng), {EncodingMethod::qubit, 3});
  MlpConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 10;
  const auto a = mlp_fit(ds, HiddenLayout::ff, Activation::selu, cfg);
  const auto b = mlp_fit(ds, HiddenLayout::ff, Activation::selu, cfg);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  cfg.seed = 11;
  const auto c = mlp_fit(ds, HiddenLayout::ff, Activation::selu, cfg);
  EXPECT_NE(to_json(a).dump(), to_json(c).dump());
}

// ---------------------------------------------------------------------------
// Predictor facade

TEST(Predictor, DefaultSpecIsTwoQubitAmplitudeOnThreeGrams) {
  const PredictorSpec spec;
  EXPECT_EQ(spec.type(), "quantum");
  EXPECT_NO_THROW(spec.validate());
  auto bad = spec;
  bad.depth = 4;  // three qubits needed
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Predictor, EveryTypeFitsAlternatingStream) {
  std::vector<Bit> w(125);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = i % 2;
  for (const char* text : {R"({"type":"quantum","encoding":"qubit","depth":2,"restarts":2})",
                           R"({"type":"quantum"})", R"({"type":"oracle","depth":2})",
                           R"({"type":"logistic","depth":2})", R"({"type":"mlp","depth":2})"}) {
    const auto spec = predictor_spec_from_json(nlohmann::json::parse(text));
    const auto p = Predictor::fit(spec, w, 12);
    EXPECT_EQ(p.training_score(), 1.0) << text;
    Rng rng(13);
    // Next bit after ...0,1 is 0.
    EXPECT_EQ(p.forecast(DGram::at(w, 125, spec.depth), rng), 1 - w.back()) << text;
    EXPECT_TRUE(p.checkpoint().contains("name"));
  }
}

TEST(Predictor, SpecJsonRoundTrip) {
  for (const char* text :
       {R"({"type":"quantum","depth":5,"encoding":"amplitude","circuit":{"family":"polar","qubits":3,"blocks":2,"range":1,"tied":true},"method":"sgd","learning_rate":0.2,"forecast":"majority","shots":7})",
        R"({"type":"oracle","depth":1,"mode":"sample","name":"O"})",
        R"({"type":"mlp","depth":4,"hidden":"fff","activation":"relu","epochs":3})"}) {
    const auto spec = predictor_spec_from_json(nlohmann::json::parse(text));
    const auto again = predictor_spec_from_json(to_json(spec));
    EXPECT_EQ(to_json(spec), to_json(again)) << text;
  }
  EXPECT_THROW(predictor_spec_from_json(nlohmann::json::parse(R"({"type":"svm"})")), std::invalid_argument);
  EXPECT_THROW(predictor_spec_from_json(nlohmann::json::parse(R"({"type":"quantum","encoding":"qubit"})")),
               std::invalid_argument);  // 3 qubits vs two-qubit circuit
}

TEST(Predictor, FitBestPrefersHigherTrainingScore) {
  std::vector<Bit> w(125);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (i % 3 == 0) ? 1 : 0;
  const std::vector<PredictorSpec> alts{
      predictor_spec_from_json(nlohmann::json::parse(R"({"type":"oracle","depth":1,"name":"short"})")),
      predictor_spec_from_json(nlohmann::json::parse(R"({"type":"oracle","depth":2,"name":"long"})")),
      predictor_spec_from_json(nlohmann::json::parse(R"({"type":"oracle","depth":2,"name":"tie"})"))};
  const auto best = fit_best(alts, w, 14);
  EXPECT_EQ(best.spec().name, "long");
  EXPECT_EQ(best.training_score(), 1.0);
}

}  // namespace
}  // namespace bitpredict
