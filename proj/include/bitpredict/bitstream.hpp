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

// Bitstreams: the corpus unit, its descriptive statistics, the synthetic
// noisy-regression generator, and the plain-text corpus format.
//
// Conventions used throughout the library:
//  * A d-gram taken at time t is most-recent-first: gram[0] = b[t-1],
//    gram[s] = b[t-s-1].
//  * Conditional statistics over a window scan every position t in [d, L)
//    and pair gram(t) with the label b[t].

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitpredict/rng.hpp"

namespace bitpredict {

using Bit = std::uint8_t;

enum class Source { synthetic, game_transcript, simple, external };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::synthetic: return "synthetic";
    case Source::game_transcript: return "game_transcript";
    case Source::simple: return "simple";
    case Source::external: return "external";
  }
  return "external";
}

inline std::optional<Source> parse_source(std::string_view s) {
  if (s == "synthetic") return Source::synthetic;
  if (s == "game_transcript") return Source::game_transcript;
  if (s == "simple") return Source::simple;
  if (s == "external") return Source::external;
  return std::nullopt;
}

struct Bitstream {
  std::vector<Bit> bits;
  Source source = Source::external;
  std::string id;

  std::size_t size() const noexcept { return bits.size(); }
  std::span<const Bit> view() const noexcept { return bits; }
};

inline void validate_bits(std::span<const Bit> bits) {
  for (Bit b : bits)
    if (b > 1) throw std::invalid_argument("bitstream element is not 0 or 1");
}

/// The d most recent bits before some time t, most-recent-first.
class DGram {
 public:
  DGram() = default;
  explicit DGram(std::vector<Bit> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw std::invalid_argument("DGram: depth must be >= 1");
    validate_bits(bits_);
  }
  DGram(std::initializer_list<Bit> bits) : DGram(std::vector<Bit>(bits)) {}

  /// The gram preceding position t of `stream`: [b[t-1], ..., b[t-d]].
  static DGram at(std::span<const Bit> stream, std::size_t t, std::size_t d) {
    if (d == 0 || t < d || t > stream.size()) throw std::out_of_range("DGram::at: need d <= t <= stream length");
    std::vector<Bit> bits(d);
    for (std::size_t s = 0; s < d; ++s) bits[s] = stream[t - 1 - s];
    return DGram(std::move(bits));
  }

  std::size_t depth() const noexcept { return bits_.size(); }
  Bit operator[](std::size_t s) const { return bits_[s]; }
  std::span<const Bit> bits() const noexcept { return bits_; }

  /// Packed key: bit s of the key holds gram[s]. Valid for depth <= 64.
  std::uint64_t key() const noexcept {
    std::uint64_t k = 0;
    for (std::size_t s = 0; s < bits_.size(); ++s) k |= std::uint64_t{bits_[s]} << s;
    return k;
  }

  static DGram from_key(std::uint64_t key, std::size_t d) {
    std::vector<Bit> bits(d);
    for (std::size_t s = 0; s < d; ++s) bits[s] = static_cast<Bit>((key >> s) & 1U);
    return DGram(std::move(bits));
  }

  friend bool operator==(const DGram&, const DGram&) = default;

 private:
  std::vector<Bit> bits_;
};

inline constexpr std::size_t kHeldoutBits = 5;

/// A training segment of a corpus stream: bits [offset, offset + width) are
/// used for fitting and the following five bits are held out for scoring.
struct TrainingWindow {
  std::string stream_id;
  std::size_t stream_index = 0;
  std::size_t offset = 0;
  std::size_t width = 0;
  std::array<Bit, kHeldoutBits> heldout{};

  /// Slices the training bits out of the stream this window was drawn from.
  std::span<const Bit> training_bits(const Bitstream& stream) const {
    if (offset + width + kHeldoutBits > stream.size()) throw std::out_of_range("TrainingWindow exceeds stream");
    return std::span<const Bit>(stream.bits).subspan(offset, width);
  }
};

inline TrainingWindow make_window(const Bitstream& stream, std::size_t stream_index, std::size_t offset,
                                  std::size_t width) {
  if (width == 0) throw std::invalid_argument("window width must be positive");
  if (offset + width + kHeldoutBits > stream.size())
    throw std::out_of_range("window offset + width + 5 exceeds stream length");
  TrainingWindow w{stream.id, stream_index, offset, width, {}};
  for (std::size_t i = 0; i < kHeldoutBits; ++i) w.heldout[i] = stream.bits[offset + width + i];
  return w;
}

// ---------------------------------------------------------------------------
// Descriptive statistics

/// |Pearson correlation| between b[t] and b[t-s] for s = 1..max_lag. A lag
/// whose overlapped subsequences have zero variance yields std::nullopt.
inline std::vector<std::optional<double>> autocorrelation(std::span<const Bit> bits, std::size_t max_lag) {
  if (max_lag == 0) throw std::invalid_argument("autocorrelation: max_lag must be positive");
  if (bits.size() <= max_lag + 1) throw std::invalid_argument("autocorrelation: stream too short for max_lag");
  std::vector<std::optional<double>> out;
  out.reserve(max_lag);
  const std::size_t n = bits.size();
  for (std::size_t s = 1; s <= max_lag; ++s) {
    const std::size_t m = n - s;
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = bits[i + s];
      const double y = bits[i];
      sx += x;
      sy += y;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double md = static_cast<double>(m);
    const double cov = sxy - sx * sy / md;
    const double vx = sxx - sx * sx / md;
    const double vy = syy - sy * sy / md;
    if (vx <= 0 || vy <= 0) {
      out.emplace_back(std::nullopt);
      continue;
    }
    out.emplace_back(std::min(1.0, std::abs(cov) / std::sqrt(vx * vy)));
  }
  return out;
}

/// Fraction of zeros in the stream.
inline double zero_bias(std::span<const Bit> bits) {
  if (bits.empty()) throw std::invalid_argument("zero_bias: empty stream");
  std::size_t zeros = 0;
  for (Bit b : bits) zeros += (b == 0);
  return static_cast<double>(zeros) / static_cast<double>(bits.size());
}

struct ConditionalCounts {
  std::size_t c0 = 0;
  std::size_t c1 = 0;
  std::size_t total() const noexcept { return c0 + c1; }
  friend bool operator==(const ConditionalCounts&, const ConditionalCounts&) = default;
};

/// Counts of the follow-on bit after every occurrence of `gram` in the window.
inline ConditionalCounts conditional_counts(const DGram& gram, std::span<const Bit> window) {
  const std::size_t d = gram.depth();
  if (window.size() < d + 1) throw std::invalid_argument("conditional_counts: window width must be >= d + 1");
  ConditionalCounts c;
  for (std::size_t t = d; t < window.size(); ++t) {
    bool match = true;
    for (std::size_t s = 0; s < d && match; ++s) match = window[t - 1 - s] == gram[s];
    if (!match) continue;
    (window[t] ? c.c1 : c.c0) += 1;
  }
  return c;
}

/// Full table of conditional counts keyed by DGram::key(), one scan of the window.
using CountTable = std::unordered_map<std::uint64_t, ConditionalCounts>;

inline CountTable count_table(std::span<const Bit> window, std::size_t d) {
  if (d == 0 || d > 64) throw std::invalid_argument("count_table: depth must be in [1, 64]");
  if (window.size() < d + 1) throw std::invalid_argument("count_table: window width must be >= d + 1");
  CountTable table;
  for (std::size_t t = d; t < window.size(); ++t) {
    std::uint64_t key = 0;
    for (std::size_t s = 0; s < d; ++s) key |= std::uint64_t{window[t - 1 - s]} << s;
    auto& c = table[key];
    (window[t] ? c.c1 : c.c0) += 1;
  }
  return table;
}

struct ConditionalFrequencies {
  double p0 = 0.5;
  double p1 = 0.5;
};

/// Empirical follow-on distribution; std::nullopt when the context is unseen.
inline std::optional<ConditionalFrequencies> conditional_frequencies(const ConditionalCounts& c) {
  if (c.total() == 0) return std::nullopt;
  const double n = static_cast<double>(c.total());
  const double p1 = static_cast<double>(c.c1) / n;
  return ConditionalFrequencies{1.0 - p1, p1};
}

inline std::optional<ConditionalFrequencies> conditional_frequencies(const DGram& gram, std::span<const Bit> window) {
  return conditional_frequencies(conditional_counts(gram, window));
}

inline std::optional<double> collision_frequency(const std::optional<ConditionalFrequencies>& f) {
  if (!f) return std::nullopt;
  return f->p0 * f->p0 + f->p1 * f->p1;
}

inline std::optional<double> collision_frequency(const DGram& gram, std::span<const Bit> window) {
  return collision_frequency(conditional_frequencies(gram, window));
}

// ---------------------------------------------------------------------------
// Synthetic generator

/// b[t] = (a_1 b[t-1] ^ ... ^ a_k b[t-k]) ^ r[t],  r[t] ~ Bernoulli(flip).
struct SyntheticRule {
  std::vector<Bit> coefficients;  // a_1..a_k
  std::vector<Bit> seed;          // b_0..b_{k-1}
  double flip_probability = 0.0;

  std::size_t order() const noexcept { return coefficients.size(); }

  void validate() const {
    if (coefficients.empty()) throw std::invalid_argument("SyntheticRule: order must be >= 1");
    if (seed.size() != coefficients.size()) throw std::invalid_argument("SyntheticRule: need exactly k seed bits");
    validate_bits(coefficients);
    validate_bits(seed);
    if (!(flip_probability >= 0.0 && flip_probability <= 1.0))
      throw std::invalid_argument("SyntheticRule: flip probability must lie in [0, 1]");
  }
};

/// The seed bits are emitted as the first k elements of the stream.
inline Bitstream synthesize(const SyntheticRule& rule, std::size_t length, Rng& rng, std::string id = "synthetic") {
  rule.validate();
  const std::size_t k = rule.order();
  if (length < k) throw std::invalid_argument("synthesize: length must be >= rule order");
  Bitstream out;
  out.id = std::move(id);
  out.source = Source::synthetic;
  out.bits.reserve(length);
  out.bits.assign(rule.seed.begin(), rule.seed.end());
  for (std::size_t t = k; t < length; ++t) {
    Bit b = 0;
    for (std::size_t j = 1; j <= k; ++j) b ^= static_cast<Bit>(rule.coefficients[j - 1] & out.bits[t - j]);
    // Always draw, so the noise sequence does not depend on the rule.
    const bool r = rng.bernoulli(rule.flip_probability);
    out.bits.push_back(static_cast<Bit>(b ^ static_cast<Bit>(r)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus format
//
//   #id=<string> source=<synthetic|game_transcript|simple|external>   (optional)
//   0101100101...
//
// One stream per line; whitespace inside a bit line is ignored; blank lines are
// skipped. Streams without a header get id "stream-<index>" and source
// external. The canonical form always writes the header.

class CorpusParseError : public std::runtime_error {
 public:
  CorpusParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("corpus parse error at line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }
}  // namespace detail

inline std::vector<Bitstream> read_corpus(std::istream& in) {
  std::vector<Bitstream> corpus;
  std::optional<Bitstream> pending;  // header seen, bits not yet
  std::size_t pending_line = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = 0;
    while (first < line.size() && detail::is_space(line[first])) ++first;
    if (first == line.size()) continue;
    if (line[first] == '#') {
      if (pending) throw CorpusParseError(lineno, first + 1, "header follows a header with no stream");
      Bitstream s;
      bool have_id = false;
      std::size_t pos = first + 1;
      while (pos < line.size()) {
        while (pos < line.size() && detail::is_space(line[pos])) ++pos;
        if (pos >= line.size()) break;
        const std::size_t start = pos;
        while (pos < line.size() && !detail::is_space(line[pos])) ++pos;
        const std::string_view token(line.data() + start, pos - start);
        const auto eq = token.find('=');
        if (eq == std::string_view::npos) throw CorpusParseError(lineno, start + 1, "expected key=value in header");
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "id") {
          if (value.empty()) throw CorpusParseError(lineno, start + 1, "empty id");
          s.id = std::string(value);
          have_id = true;
        } else if (key == "source") {
          auto src = parse_source(value);
          if (!src) throw CorpusParseError(lineno, start + eq + 2, "unknown source '" + std::string(value) + "'");
          s.source = *src;
        } else {
          throw CorpusParseError(lineno, start + 1, "unknown header key '" + std::string(key) + "'");
        }
      }
      if (!have_id) s.id.clear();
      pending = std::move(s);
      pending_line = lineno;
      continue;
    }
    Bitstream s = pending ? std::move(*pending) : Bitstream{};
    pending.reset();
    for (std::size_t i = first; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '0' || c == '1') {
        s.bits.push_back(static_cast<Bit>(c - '0'));
      } else if (!detail::is_space(c)) {
        throw CorpusParseError(lineno, i + 1, std::string("unexpected character '") + c + "'");
      }
    }
    if (s.id.empty()) s.id = "stream-" + std::to_string(corpus.size());
    corpus.push_back(std::move(s));
  }
  if (pending) throw CorpusParseError(pending_line, 1, "header without a following stream");
  return corpus;
}

inline std::vector<Bitstream> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  return read_corpus(in);
}

inline std::vector<Bitstream> parse_corpus(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_corpus(in);
}

inline void write_corpus(std::span<const Bitstream> streams, std::ostream& out) {
  for (const auto& s : streams) {
    if (s.bits.empty()) throw std::invalid_argument("write_corpus: stream '" + s.id + "' is empty");
    validate_bits(s.bits);
    for (char c : s.id)
      if (detail::is_space(c) || c == '\n') throw std::invalid_argument("write_corpus: id contains whitespace");
    if (s.id.empty()) throw std::invalid_argument("write_corpus: empty id");
    out << "#id=" << s.id << " source=" << to_string(s.source) << '\n';
    std::string line(s.bits.size(), '0');
    for (std::size_t i = 0; i < s.bits.size(); ++i) line[i] = static_cast<char>('0' + s.bits[i]);
    out << line << '\n';
  }
}

inline void write_corpus(std::span<const Bitstream> streams, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open corpus file for writing: " + path);
  write_corpus(streams, out);
}

inline std::string format_corpus(std::span<const Bitstream> streams) {
  std::ostringstream out;
  write_corpus(streams, out);
  return out.str();
}

}  // namespace bitpredict
