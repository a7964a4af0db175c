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

// bitpredict: command-line front end.
//
//   generate   synthetic corpora from a noisy XOR-regression rule
//   analyze    autocorrelation, zero bias and collision statistics
//   train      fit one predictor on one window and write a checkpoint
//   evaluate   run an experiment file over a corpus
//   sweep      run a (method x d x L) grid and print the tables
//   serve      start the game service

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bitpredict/bitstream.hpp"
#include "bitpredict/game.hpp"
#include "bitpredict/harness.hpp"
#include "bitpredict/predictor.hpp"
#include "bitpredict/service.hpp"

namespace bp = bitpredict;

namespace {

std::vector<bp::Bit> parse_bit_list(const std::string& s, const char* what) {
  std::vector<bp::Bit> out;
  for (char c : s) {
    if (c == '0' || c == '1') out.push_back(static_cast<bp::Bit>(c - '0'));
    else if (c != ',' && c != ' ') throw std::invalid_argument(std::string(what) + ": expected 0/1 digits, got '" + s + "'");
  }
  return out;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void emit_reports(std::span<const bp::EvaluationReport> reports, const std::string& csv, const std::string& json,
                  const std::string& segments_csv) {
  std::cout << bp::format_tables(reports);
  for (const auto& r : reports)
    if (r.error) std::cerr << "error: " << r.spec.method_label() << " d=" << r.spec.depth() << " L=" << r.spec.width
                           << ": " << *r.error << '\n';
  if (!csv.empty()) write_text(csv, bp::to_csv(reports));
  if (!json.empty()) write_text(json, bp::to_json(reports).dump(2) + "\n");
  if (!segments_csv.empty() && reports.size() == 1) write_text(segments_csv, bp::segments_csv(reports.front()));
}

httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bit prediction with variational quantum classifiers and classical baselines"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus");
  std::string coefficients = "1,0,1", seed_bits, out_path = "-", id_prefix = "synthetic";
  double flip = 0.2;
  std::size_t length = 1000, streams = 1;
  std::uint64_t gen_seed = 1;
  gen->add_option("--coefficients,-a", coefficients, "XOR taps a_1..a_k, e.g. 1,0,1")->capture_default_str();
  gen->add_option("--seed-bits", seed_bits, "initial k bits (default: drawn at random)");
  gen->add_option("--flip,-p", flip, "noise flip probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--length,-n", length, "bits per stream")->capture_default_str();
  gen->add_option("--streams", streams, "number of streams")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--id-prefix", id_prefix)->capture_default_str();
  gen->add_option("--out,-o", out_path, "corpus file ('-' for stdout)")->capture_default_str();

  // analyze
  auto* ana = app.add_subcommand("analyze", "Descriptive statistics of a corpus");
  std::string corpus_path;
  std::size_t lags = 36, depth = 3, width = 0, segments = 1000;
  std::uint64_t ana_seed = 1;
  ana->add_option("corpus", corpus_path, "corpus file")->required()->check(CLI::ExistingFile);
  ana->add_option("--lags", lags, "autocorrelation taps")->capture_default_str();
  ana->add_option("--depth,-d", depth, "gram depth for collision statistics")->capture_default_str();
  ana->add_option("--width,-L", width, "also estimate windowed collision frequency over staggered windows");
  ana->add_option("--segments,-M", segments, "staggered windows for --width")->capture_default_str();
  ana->add_option("--seed", ana_seed, "staggering seed")->capture_default_str();

  // train
  auto* tr = app.add_subcommand("train", "Fit one predictor on one window and print its checkpoint");
  std::string predictor_path, train_out = "-";
  std::size_t stream_index = 0, offset = 0, train_width = 125;
  std::uint64_t train_seed = 1;
  tr->add_option("corpus", corpus_path, "corpus file")->required()->check(CLI::ExistingFile);
  tr->add_option("--predictor", predictor_path, "predictor spec (JSON)")->required()->check(CLI::ExistingFile);
  tr->add_option("--stream", stream_index, "stream index")->capture_default_str();
  tr->add_option("--offset", offset, "window offset")->capture_default_str();
  tr->add_option("--width,-L", train_width, "window width")->capture_default_str();
  tr->add_option("--seed", train_seed, "training seed")->capture_default_str();
  tr->add_option("--out,-o", train_out, "checkpoint file ('-' for stdout)")->capture_default_str();

  // evaluate / sweep
  std::string config_path, csv_path, json_path, seg_path;
  std::size_t threads = 0;
  auto* ev = app.add_subcommand("evaluate", "Run one experiment over a corpus");
  ev->add_option("corpus", corpus_path, "corpus file")->required()->check(CLI::ExistingFile);
  ev->add_option("--spec", config_path, "experiment file (JSON)")->required()->check(CLI::ExistingFile);
  ev->add_option("--threads,-j", threads, "worker threads (0: all cores)")->capture_default_str();
  ev->add_option("--csv", csv_path, "summary CSV output");
  ev->add_option("--json", json_path, "report JSON output");
  ev->add_option("--segments-csv", seg_path, "per-segment CSV output");

  auto* sw = app.add_subcommand("sweep", "Run a hyperparameter grid over a corpus");
  sw->add_option("corpus", corpus_path, "corpus file")->required()->check(CLI::ExistingFile);
  sw->add_option("--grid", config_path, "grid file (JSON)")->required()->check(CLI::ExistingFile);
  sw->add_option("--threads,-j", threads, "worker threads (0: all cores)")->capture_default_str();
  sw->add_option("--csv", csv_path, "summary CSV output");
  sw->add_option("--json", json_path, "report JSON output");

  // serve
  auto* sv = app.add_subcommand("serve", "Run the game service");
  std::string host = "127.0.0.1", transcripts;
  int port = 8080;
  std::uint64_t serve_seed = 0;
  sv->add_option("--host", host)->capture_default_str();
  sv->add_option("--port", port)->capture_default_str();
  sv->add_option("--seed", serve_seed, "store seed for sessions created without one")->capture_default_str();
  sv->add_option("--transcripts", transcripts, "directory for append-only transcript files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      bp::SyntheticRule rule;
      rule.coefficients = parse_bit_list(coefficients, "--coefficients");
      rule.flip_probability = flip;
      bp::Rng rng(gen_seed);
      std::vector<bp::Bitstream> corpus;
      for (std::size_t s = 0; s < streams; ++s) {
        rule.seed = seed_bits.empty() ? std::vector<bp::Bit>{} : parse_bit_list(seed_bits, "--seed-bits");
        if (rule.seed.empty())
          for (std::size_t i = 0; i < rule.order(); ++i) rule.seed.push_back(rng.bernoulli(0.5) ? 1 : 0);
        corpus.push_back(bp::synthesize(rule, length, rng, id_prefix + "-" + std::to_string(s)));
      }
      write_text(out_path, bp::format_corpus(corpus));
      return 0;
    }

    if (ana->parsed()) {
      const auto corpus = bp::read_corpus(corpus_path);
      nlohmann::json out = nlohmann::json::array();
      for (const auto& s : corpus) {
        nlohmann::json j{{"id", s.id}, {"source", std::string(bp::to_string(s.source))}, {"length", s.size()}};
        if (!s.bits.empty()) j["zero_bias"] = bp::zero_bias(s.bits);
        if (s.size() > lags + 1) {
          nlohmann::json ac = nlohmann::json::array();
          for (const auto& a : bp::autocorrelation(s.bits, lags)) ac.push_back(a ? nlohmann::json(*a) : nlohmann::json());
          j["autocorrelation"] = ac;
        }
        if (s.size() > depth) {
          // Mean collision frequency of each position's context over the whole stream.
          double sum = 0;
          std::size_t n = 0;
          const auto table = bp::count_table(s.bits, depth);
          for (std::size_t t = depth; t < s.size(); ++t) {
            const auto f = bp::conditional_frequencies(table.at(bp::DGram::at(s.bits, t, depth).key()));
            sum += f->p0 * f->p0 + f->p1 * f->p1;
            ++n;
          }
          j["collision_frequency"] = sum / static_cast<double>(n);
        }
        out.push_back(j);
      }
      nlohmann::json result{{"depth", depth}, {"streams", out}};
      if (width > 0) {
        // Expected accuracy of the sampling oracle: collision frequency of the
        // context preceding each staggered window's first held-out bit.
        bp::Rng rng(ana_seed);
        const auto windows = bp::stagger(corpus, width, segments, rng);
        std::vector<double> values;
        for (const auto& w : windows) {
          const auto& s = corpus[w.stream_index];
          const auto gram = bp::DGram::at(s.bits, w.offset + w.width, depth);
          if (auto c = bp::collision_frequency(gram, w.training_bits(s))) values.push_back(*c);
        }
        if (!values.empty()) {
          const auto sum = bp::aggregate(values);
          result["windowed_collision"] = {{"width", width},  {"windows", windows.size()}, {"seen", values.size()},
                                          {"mean", sum.mean}, {"stddev", sum.stddev}};
        }
      }
      std::cout << result.dump(2) << '\n';
      return 0;
    }

    if (tr->parsed()) {
      const auto corpus = bp::read_corpus(corpus_path);
      if (stream_index >= corpus.size()) throw std::invalid_argument("--stream out of range");
      const auto spec = bp::predictor_spec_from_json(read_json(predictor_path));
      const auto window = bp::make_window(corpus[stream_index], stream_index, offset, train_width);
      const auto model = bp::Predictor::fit(spec, window.training_bits(corpus[stream_index]), train_seed);
      nlohmann::json j = model.checkpoint();
      j["spec"] = bp::to_json(spec);
      j["window"] = {{"stream", window.stream_id}, {"offset", offset}, {"width", train_width}};
      write_text(train_out, j.dump(2) + "\n");
      return 0;
    }

    if (ev->parsed()) {
      const auto corpus = bp::read_corpus(corpus_path);
      const auto spec = bp::experiment_from_json(read_json(config_path));
      const auto report = bp::evaluate(spec, corpus, threads, corpus_path);
      emit_reports(std::span(&report, 1), csv_path, json_path, seg_path);
      return report.error ? 1 : 0;
    }

    if (sw->parsed()) {
      const auto corpus = bp::read_corpus(corpus_path);
      const auto grid = bp::sweep_grid_from_json(read_json(config_path));
      const auto reports = bp::run_sweep(grid, corpus, threads, corpus_path);
      emit_reports(reports, csv_path, json_path, "");
      return 0;
    }

    if (sv->parsed()) {
      bp::SessionStore store(serve_seed, transcripts.empty() ? std::nullopt
                                                             : std::optional<std::filesystem::path>(transcripts));
      httplib::Server server;
      bp::install_routes(server, store);
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
      });
      std::cerr << "listening on http://" << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const bp::CorpusParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
