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

// Staggered-window evaluation: draw M windows of L training bits (plus five
// held-out bits) uniformly across a corpus, fit a predictor on each window,
// score it on the held-out bits and aggregate to (mean, stddev).

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitpredict/bitstream.hpp"
#include "bitpredict/predictor.hpp"
#include "bitpredict/rng.hpp"

namespace bitpredict {

inline constexpr std::size_t kDefaultSegments = 1000;

struct ExperimentSpec {
  std::string label;                     // method column in tables; defaults to the first predictor's name
  std::vector<PredictorSpec> predictors;  // more than one: model selection by training score
  std::size_t width = 125;               // L
  std::size_t segments = kDefaultSegments;  // M
  std::uint64_t seed = 0;

  std::size_t depth() const {
    if (predictors.empty()) throw std::invalid_argument("experiment has no predictor");
    return predictors.front().depth;
  }

  std::string method_label() const { return label.empty() && !predictors.empty() ? predictors.front().name : label; }

  void validate() const {
    if (predictors.empty()) throw std::invalid_argument("experiment has no predictor");
    for (const auto& p : predictors) {
      p.validate();
      if (p.depth != depth()) throw std::invalid_argument("predictor alternatives must share one depth");
    }
    if (width < depth() + 1) throw std::invalid_argument("window width L must be >= d + 1");
    if (segments < 1) throw std::invalid_argument("segment count M must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Staggering

/// Draws M windows uniformly over all admissible (stream, offset) pairs:
/// offset tau ~ Uniform{0 .. T-L-5} within a stream, streams weighted by
/// their number of admissible offsets. Streams shorter than L + 5 are skipped.
inline std::vector<TrainingWindow> stagger(std::span<const Bitstream> corpus, std::size_t width,
                                           std::size_t segments, Rng& rng) {
  if (width == 0) throw std::invalid_argument("stagger: window width must be positive");
  std::vector<std::size_t> eligible;
  std::vector<std::uint64_t> cumulative;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].size() < width + kHeldoutBits) continue;
    total += corpus[i].size() - width - kHeldoutBits + 1;
    eligible.push_back(i);
    cumulative.push_back(total);
  }
  if (eligible.empty())
    throw std::invalid_argument("stagger: no stream has length >= L + 5 = " + std::to_string(width + kHeldoutBits));
  std::vector<TrainingWindow> out;
  out.reserve(segments);
  for (std::size_t m = 0; m < segments; ++m) {
    const std::uint64_t draw = rng.below(total);
    const auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), draw) -
                                            cumulative.begin());
    const std::uint64_t before = k == 0 ? 0 : cumulative[k - 1];
    out.push_back(make_window(corpus[eligible[k]], eligible[k], static_cast<std::size_t>(draw - before), width));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

/// Fits on the window's L bits only, then forecasts the five held-out bits in
/// turn. Each forecast conditions on the true preceding bits (teacher forcing);
/// the model is not refit. `fit(span<const Bit>)` must return an object with
/// `forecast(const DGram&, Rng&) -> Bit` and `depth()`.
template <class Fit>
double score(const Bitstream& stream, const TrainingWindow& window, Fit&& fit, Rng& rng) {
  const auto training = window.training_bits(stream);
  const auto model = fit(training);
  const std::size_t d = model.depth();
  const std::span<const Bit> bits(stream.bits);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < kHeldoutBits; ++i) {
    const std::size_t t = window.offset + window.width + i;
    if (t < d) throw std::invalid_argument("score: not enough history for the gram depth");
    correct += model.forecast(DGram::at(bits, t, d), rng) == window.heldout[i];
  }
  return static_cast<double>(correct) / static_cast<double>(kHeldoutBits);
}

struct Summary {
  double mean = 0;
  double stddev = 0;
};

/// Sample mean and (n - 1)-denominator standard deviation; a single score has
/// stddev 0.
inline Summary aggregate(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("aggregate: no scores");
  const double n = static_cast<double>(scores.size());
  double mean = 0;
  for (double s : scores) mean += s;
  mean /= n;
  if (scores.size() == 1) return {mean, 0.0};
  double ss = 0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / (n - 1))};
}

// ---------------------------------------------------------------------------
// Experiments

struct EvaluationReport {
  ExperimentSpec spec;
  std::string corpus_id;
  std::vector<TrainingWindow> windows;
  std::vector<double> scores;
  Summary summary;
  std::optional<std::string> error;
  std::string started;   // ISO-8601 UTC; excluded from canonical output
  std::string finished;
};

namespace detail {

inline constexpr std::uint64_t kStaggerTag = 0x5354;
inline constexpr std::uint64_t kFitTag = 0x4649;
inline constexpr std::uint64_t kForecastTag = 0x464f;

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline double score_segment(const ExperimentSpec& spec, const Bitstream& stream, const TrainingWindow& window,
                            std::size_t segment) {
  Rng rng(derive_seed(spec.seed, {kForecastTag, segment}));
  const std::uint64_t fit_seed = derive_seed(spec.seed, {kFitTag, segment});
  return score(
      stream, window, [&](std::span<const Bit> bits) { return fit_best(spec.predictors, bits, fit_seed); }, rng);
}

}  // namespace detail

/// Runs every experiment of the grid over the corpus on up to `parallelism`
/// threads (0: hardware concurrency). Every segment's randomness derives from
/// (experiment seed, segment index) alone, so the result does not depend on
/// scheduling. A failing experiment is reported with `error` set.
inline std::vector<EvaluationReport> run_sweep(std::span<const ExperimentSpec> grid,
                                               std::span<const Bitstream> corpus, std::size_t parallelism = 0,
                                               const std::string& corpus_id = "") {
  if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
  std::vector<EvaluationReport> reports(grid.size());
  struct Job {
    std::size_t experiment;
    std::size_t segment;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < grid.size(); ++e) {
    auto& r = reports[e];
    r.spec = grid[e];
    r.corpus_id = corpus_id;
    r.started = detail::utc_now();
    try {
      r.spec.validate();
      Rng rng(derive_seed(r.spec.seed, {detail::kStaggerTag}));
      r.windows = stagger(corpus, r.spec.width, r.spec.segments, rng);
      r.scores.assign(r.windows.size(), 0.0);
      for (std::size_t m = 0; m < r.windows.size(); ++m) jobs.push_back({e, m});
    } catch (const std::exception& ex) {
      r.error = ex.what();
    }
  }

  // Per-segment failures; the lowest failing segment's message wins so the
  // report does not depend on thread timing.
  std::vector<std::map<std::size_t, std::string>> failures(grid.size());
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const auto [e, m] = jobs[i];
      auto& r = reports[e];
      try {
        r.scores[m] = detail::score_segment(r.spec, corpus[r.windows[m].stream_index], r.windows[m], m);
      } catch (const std::exception& ex) {
        std::lock_guard lock(failure_mutex);
        failures[e].emplace(m, ex.what());
      }
    }
  };
  std::size_t threads = parallelism == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallelism;
  threads = std::min(threads, std::max<std::size_t>(1, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t e = 0; e < grid.size(); ++e) {
    auto& r = reports[e];
    if (!failures[e].empty()) {
      const auto& [m, what] = *failures[e].begin();
      r.error = "segment " + std::to_string(m) + ": " + what;
    }
    if (r.error) {
      r.scores.clear();
    } else {
      r.summary = aggregate(r.scores);
    }
    r.finished = detail::utc_now();
  }
  return reports;
}

inline EvaluationReport evaluate(const ExperimentSpec& spec, std::span<const Bitstream> corpus,
                                 std::size_t parallelism = 0, const std::string& corpus_id = "") {
  return std::move(run_sweep(std::span(&spec, 1), corpus, parallelism, corpus_id).front());
}

// ---------------------------------------------------------------------------
// Emitters

/// Three decimals with trailing zeros dropped: 0.630 -> "0.63", 0.225 -> "0.225".
inline std::string format_decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

inline std::string format_cell(const Summary& s) {
  return "(" + format_decimal(s.mean) + "," + format_decimal(s.stddev) + ")";
}

/// One aligned text table per method: rows d, columns L, cells "(mu,sigma)".
/// Failed experiments show "error", missing (d, L) pairs "-".
inline std::string format_tables(std::span<const EvaluationReport> reports) {
  std::vector<std::string> methods;
  for (const auto& r : reports)
    if (std::find(methods.begin(), methods.end(), r.spec.method_label()) == methods.end())
      methods.push_back(r.spec.method_label());

  std::ostringstream out;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    std::set<std::size_t> depths, widths;
    std::map<std::pair<std::size_t, std::size_t>, std::string> cells;
    for (const auto& r : reports) {
      if (r.spec.method_label() != methods[mi]) continue;
      const std::size_t d = r.spec.depth(), L = r.spec.width;
      depths.insert(d);
      widths.insert(L);
      cells[{d, L}] = r.error ? "error" : format_cell(r.summary);
    }
    std::vector<std::vector<std::string>> rows;
    rows.push_back({methods[mi]});
    for (auto L : widths) rows.back().push_back("L=" + std::to_string(L));
    for (auto d : depths) {
      rows.push_back({"d=" + std::to_string(d)});
      for (auto L : widths) {
        auto it = cells.find({d, L});
        rows.back().push_back(it == cells.end() ? "-" : it->second);
      }
    }
    std::vector<std::size_t> col(rows.front().size(), 0);
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c) col[c] = std::max(col[c], row[c].size());
    if (mi > 0) out << '\n';
    for (const auto& row : rows) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        line += row[c];
        if (c + 1 < row.size()) line.append(col[c] - row[c].size() + 2, ' ');
      }
      out << line << '\n';
    }
  }
  return out.str();
}

/// One row per experiment.
inline std::string to_csv(std::span<const EvaluationReport> reports) {
  std::ostringstream out;
  out << "method,type,d,L,M,seed,mean,stddev,error\n";
  for (const auto& r : reports) {
    std::string err = r.error.value_or("");
    std::replace(err.begin(), err.end(), '"', '\'');
    char mean[32], sd[32];
    std::snprintf(mean, sizeof mean, "%.6f", r.summary.mean);
    std::snprintf(sd, sizeof sd, "%.6f", r.summary.stddev);
    out << r.spec.method_label() << ',' << r.spec.predictors.front().type() << ',' << r.spec.depth() << ','
        << r.spec.width << ',' << r.spec.segments << ',' << r.spec.seed << ',' << (r.error ? "" : mean) << ','
        << (r.error ? "" : sd) << ",\"" << err << "\"\n";
  }
  return out.str();
}

/// Per-segment rows.
inline std::string segments_csv(const EvaluationReport& r) {
  std::ostringstream out;
  out << "segment,stream,offset,score\n";
  for (std::size_t m = 0; m < r.scores.size(); ++m)
    out << m << ',' << r.windows[m].stream_id << ',' << r.windows[m].offset << ',' << format_decimal(r.scores[m])
        << '\n';
  return out.str();
}

inline nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : spec.predictors) preds.push_back(to_json(p));
  return {{"label", spec.method_label()}, {"predictors", preds}, {"width", spec.width},
          {"segments", spec.segments},   {"seed", spec.seed}};
}

/// `canonical` leaves out wall-clock timestamps so equal runs serialize to
/// identical bytes.
inline nlohmann::json to_json(const EvaluationReport& r, bool canonical = true) {
  nlohmann::json j;
  j["spec"] = to_json(r.spec);
  j["corpus"] = r.corpus_id;
  if (r.error) {
    j["error"] = *r.error;
  } else {
    j["mean"] = r.summary.mean;
    j["stddev"] = r.summary.stddev;
  }
  nlohmann::json segs = nlohmann::json::array();
  for (std::size_t m = 0; m < r.scores.size(); ++m)
    segs.push_back({{"stream", r.windows[m].stream_id}, {"offset", r.windows[m].offset}, {"score", r.scores[m]}});
  j["segments"] = segs;
  if (!canonical) {
    j["started"] = r.started;
    j["finished"] = r.finished;
  }
  return j;
}

inline nlohmann::json to_json(std::span<const EvaluationReport> reports, bool canonical = true) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) j.push_back(to_json(r, canonical));
  return j;
}

// ---------------------------------------------------------------------------
// Config files

namespace detail {
inline std::vector<PredictorSpec> alternatives_from_json(const nlohmann::json& j) {
  std::vector<PredictorSpec> out;
  if (j.is_array()) {
    for (const auto& p : j) out.push_back(predictor_spec_from_json(p));
  } else {
    out.push_back(predictor_spec_from_json(j));
  }
  if (out.empty()) throw std::invalid_argument("predictor list is empty");
  return out;
}
}  // namespace detail

/// {"label": "QC", "predictor": {...} | [{...}, ...], "width": 125,
///  "segments": 1000, "seed": 1}
inline ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.predictors = detail::alternatives_from_json(j.at("predictor"));
  spec.label = j.value("label", std::string{});
  spec.width = j.value("width", spec.width);
  spec.segments = j.value("segments", spec.segments);
  spec.seed = j.value("seed", spec.seed);
  spec.validate();
  return spec;
}

/// {"seed": 1, "segments": 1000, "widths": [100, 125, 150], "depths": [3, 4, 7],
///  "methods": [{"label": "LR", "predictor": {...} | [...]}, ...]}
/// Expands to methods x depths x widths; each predictor's depth is replaced by
/// the grid depth and each cell gets a seed derived from (seed, method, d, L).
inline std::vector<ExperimentSpec> sweep_grid_from_json(const nlohmann::json& j) {
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  const std::size_t segments = j.value("segments", kDefaultSegments);
  const auto widths = j.at("widths").get<std::vector<std::size_t>>();
  const auto depths = j.at("depths").get<std::vector<std::size_t>>();
  const auto& methods = j.at("methods");
  if (widths.empty() || depths.empty() || methods.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<ExperimentSpec> grid;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const auto& m = methods[mi];
    for (auto d : depths) {
      for (auto L : widths) {
        ExperimentSpec spec;
        nlohmann::json preds = m.at("predictor");
        if (!preds.is_array()) preds = nlohmann::json::array({preds});
        for (auto& p : preds) {
          p["depth"] = d;
          spec.predictors.push_back(predictor_spec_from_json(p));
        }
        spec.label = m.value("label", std::string{});
        spec.width = L;
        spec.segments = segments;
        spec.seed = derive_seed(seed, {mi, d, L});
        spec.validate();
        grid.push_back(std::move(spec));
      }
    }
  }
  return grid;
}

}  // namespace bitpredict
