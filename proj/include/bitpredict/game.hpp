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

// Human-vs-predictor game. Each round the computer commits to a bit c by
// publishing SHA-256("<c>:<nonce>"), then the human enters b; the computer
// wins iff c == b. The human's balance moves by one stake per round and the
// game stops at the jackpot or broke cutoff.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "bitpredict/bitstream.hpp"
#include "bitpredict/predictor.hpp"
#include "bitpredict/rng.hpp"

namespace bitpredict {

/// Thrown for calls the round protocol does not allow in the current state.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

inline std::string commitment_hash(Bit c, std::string_view nonce) {
  return sha256_hex(std::string(1, static_cast<char>('0' + c)) + ":" + std::string(nonce));
}

struct Stakes {
  int stake = 1;
  int jackpot = 25;
  int broke = -25;

  void validate() const {
    if (stake <= 0) throw std::invalid_argument("stake must be positive");
    if (jackpot <= 0) throw std::invalid_argument("jackpot threshold must be positive");
    if (broke >= 0) throw std::invalid_argument("broke threshold must be negative");
  }
};

enum class SessionStatus { active, jackpot, broke, ended };

inline std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::active: return "active";
    case SessionStatus::jackpot: return "jackpot";
    case SessionStatus::broke: return "broke";
    case SessionStatus::ended: return "ended";
  }
  return "active";
}

inline constexpr std::size_t kDefaultGameWindow = 125;

struct GameConfig {
  std::vector<PredictorSpec> predictors{default_predictor()};
  bool random_choice = false;  // pick one of `predictors` per session instead of the first
  std::size_t window = kDefaultGameWindow;
  Stakes stakes;
  std::uint64_t seed = 0;

  static PredictorSpec default_predictor() {
    PredictorSpec p;
    QuantumSpec q;
    q.train.restarts = 4;
    p.method = q;
    return p;
  }

  void validate() const {
    if (predictors.empty()) throw std::invalid_argument("game needs at least one predictor");
    for (const auto& p : predictors) {
      p.validate();
      if (window < p.depth + 1) throw std::invalid_argument("game window must be >= d + 1");
    }
    stakes.validate();
  }
};

inline GameConfig game_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("session spec must be a JSON object");
  GameConfig c;
  if (j.contains("predictor")) {
    c.predictors.clear();
    const auto& p = j.at("predictor");
    if (p.is_array()) {
      for (const auto& x : p) c.predictors.push_back(predictor_spec_from_json(x));
    } else {
      c.predictors.push_back(predictor_spec_from_json(p));
    }
  }
  const std::string choice = j.value("choice", "fixed");
  if (choice != "fixed" && choice != "random") throw std::invalid_argument("choice must be 'fixed' or 'random'");
  c.random_choice = choice == "random";
  c.window = j.value("window", c.window);
  c.stakes.stake = j.value("stake", c.stakes.stake);
  c.stakes.jackpot = j.value("jackpot", c.stakes.jackpot);
  c.stakes.broke = j.value("broke", c.stakes.broke);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

struct RoundRecord {
  std::size_t round = 0;
  std::string hash;
  std::string nonce;
  Bit computer = 0;
  Bit human = 0;
  bool win = false;  // the computer's win: c == b
  int balance = 0;   // human balance after the round
};

inline nlohmann::json to_json(const RoundRecord& r) {
  return {{"round", r.round}, {"hash", r.hash},       {"nonce", r.nonce},    {"computer", r.computer},
          {"human", r.human}, {"win", r.win},         {"balance", r.balance}};
}

inline RoundRecord round_record_from_json(const nlohmann::json& j) {
  RoundRecord r;
  r.round = j.at("round").get<std::size_t>();
  r.hash = j.at("hash").get<std::string>();
  r.nonce = j.at("nonce").get<std::string>();
  r.computer = j.at("computer").get<Bit>();
  r.human = j.at("human").get<Bit>();
  r.win = j.at("win").get<bool>();
  r.balance = j.at("balance").get<int>();
  if (r.computer > 1 || r.human > 1) throw std::invalid_argument("transcript bit is not 0/1");
  return r;
}

inline std::vector<RoundRecord> parse_transcript(std::istream& in) {
  std::vector<RoundRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(round_record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

inline std::vector<RoundRecord> parse_transcript(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_transcript(in);
}

struct ReplayResult {
  bool ok = true;
  std::string error;  // first inconsistency
  int balance = 0;
  SessionStatus status = SessionStatus::active;
};

/// Re-derives every round from (c, b, nonce): hash, win flag and running
/// balance, and checks that play stopped at a cutoff.
inline ReplayResult replay(std::span<const RoundRecord> records, const Stakes& stakes = {}) {
  ReplayResult res;
  auto fail = [&](std::size_t i, const std::string& why) {
    res.ok = false;
    res.error = "round " + std::to_string(i) + ": " + why;
    return res;
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (res.status != SessionStatus::active) return fail(i, "round played after the game ended");
    if (r.round != i) return fail(i, "round numbers are not consecutive");
    if (commitment_hash(r.computer, r.nonce) != r.hash) return fail(i, "commitment hash does not verify");
    if (r.win != (r.computer == r.human)) return fail(i, "win flag disagrees with the bits");
    res.balance += r.win ? -stakes.stake : stakes.stake;
    if (r.balance != res.balance) return fail(i, "recorded balance disagrees with replay");
    if (res.balance <= stakes.broke) res.status = SessionStatus::broke;
    if (res.balance >= stakes.jackpot) res.status = SessionStatus::jackpot;
  }
  return res;
}

class GameSession {
 public:
  GameSession(std::string id, GameConfig config) : id_(std::move(id)), config_(std::move(config)) {
    config_.validate();
    if (config_.random_choice) {
      Rng rng(derive_seed(config_.seed, {kChoiceTag}));
      choice_ = static_cast<std::size_t>(rng.below(config_.predictors.size()));
    }
  }

  const std::string& id() const noexcept { return id_; }
  const GameConfig& config() const noexcept { return config_; }
  const PredictorSpec& predictor() const noexcept { return config_.predictors[choice_]; }
  SessionStatus status() const noexcept { return status_; }
  int balance() const noexcept { return balance_; }
  std::size_t round() const noexcept { return records_.size(); }
  const std::vector<Bit>& history() const noexcept { return history_; }
  const std::vector<RoundRecord>& records() const noexcept { return records_; }
  std::optional<std::string> pending_hash() const {
    return pending_ ? std::optional<std::string>(pending_->hash) : std::nullopt;
  }

  /// The computer's bit for the next round, computed from the human's bits so
  /// far only: a fair coin until d + 1 bits exist, then a fresh fit on the
  /// most recent `window` bits. Pure in (config, seed, history).
  Bit computer_bit() const {
    const std::size_t t = history_.size();
    const std::size_t d = predictor().depth;
    if (t < d + 1) {
      Rng coin(derive_seed(config_.seed, {kCoinTag, t}));
      return coin.bernoulli(0.5) ? 1 : 0;
    }
    const std::size_t start = t > config_.window ? t - config_.window : 0;
    const std::span<const Bit> window = std::span<const Bit>(history_).subspan(start);
    const Predictor model = Predictor::fit(predictor(), window, derive_seed(config_.seed, {kFitTag, t}));
    Rng rng(derive_seed(config_.seed, {kForecastTag, t}));
    return model.forecast(DGram::at(history_, t, d), rng);
  }

  std::string commit() {
    if (status_ != SessionStatus::active) throw ProtocolError("session is not active");
    if (pending_) throw ProtocolError("a commitment is already pending");
    Pending p;
    p.computer = computer_bit();
    Rng rng(derive_seed(config_.seed, {kNonceTag, history_.size()}));
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng.next()),
                  static_cast<unsigned long long>(rng.next()));
    p.nonce = buf;
    p.hash = commitment_hash(p.computer, p.nonce);
    pending_ = std::move(p);
    return pending_->hash;
  }

  RoundRecord play(Bit human) {
    if (status_ != SessionStatus::active) throw ProtocolError("session is not active");
    if (!pending_) throw ProtocolError("no pending commitment; commit before playing");
    if (human > 1) throw std::invalid_argument("human bit must be 0 or 1");
    RoundRecord r;
    r.round = records_.size();
    r.hash = pending_->hash;
    r.nonce = pending_->nonce;
    r.computer = pending_->computer;
    r.human = human;
    r.win = r.computer == human;
    balance_ += r.win ? -config_.stakes.stake : config_.stakes.stake;
    r.balance = balance_;
    if (balance_ <= config_.stakes.broke) status_ = SessionStatus::broke;
    if (balance_ >= config_.stakes.jackpot) status_ = SessionStatus::jackpot;
    pending_.reset();
    history_.push_back(human);
    records_.push_back(r);
    return r;
  }

  void end() {
    if (status_ == SessionStatus::active) status_ = SessionStatus::ended;
    pending_.reset();
  }

  std::string transcript_jsonl() const {
    std::string out;
    for (const auto& r : records_) out += to_json(r).dump() + "\n";
    return out;
  }

  /// The human's bits as a corpus stream.
  Bitstream human_stream() const { return Bitstream{history_, Source::game_transcript, id_}; }

  nlohmann::json state() const {
    nlohmann::json recent = nlohmann::json::array();
    const std::size_t from = records_.size() > kRecentRounds ? records_.size() - kRecentRounds : 0;
    for (std::size_t i = from; i < records_.size(); ++i) recent.push_back(to_json(records_[i]));
    nlohmann::json j{{"id", id_},
                     {"status", std::string(to_string(status_))},
                     {"balance", balance_},
                     {"round", records_.size()},
                     {"predictor", predictor().name},
                     {"stakes",
                      {{"stake", config_.stakes.stake},
                       {"jackpot", config_.stakes.jackpot},
                       {"broke", config_.stakes.broke}}},
                     {"window", config_.window},
                     {"pending", pending_ ? nlohmann::json(pending_->hash) : nlohmann::json(nullptr)},
                     {"recent", recent}};
    return j;
  }

  /// Post-game predictability statistics over the human's bits.
  nlohmann::json report() const {
    nlohmann::json j{{"rounds", history_.size()}};
    if (history_.size() < kMinReportRounds) {
      j["insufficient"] = true;
      return j;
    }
    j["insufficient"] = false;
    const std::size_t lags = std::min<std::size_t>(kReportTaps, history_.size() - 2);
    nlohmann::json ac = nlohmann::json::array();
    for (const auto& a : autocorrelation(history_, lags)) ac.push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
    j["autocorrelation"] = ac;
    j["zero_bias"] = zero_bias(history_);
    std::size_t wins = 0;
    for (const auto& r : records_) wins += r.win;
    j["computer_accuracy"] = static_cast<double>(wins) / static_cast<double>(records_.size());
    return j;
  }

 private:
  static constexpr std::uint64_t kChoiceTag = 0x4348;
  static constexpr std::uint64_t kCoinTag = 0x434f;
  static constexpr std::uint64_t kFitTag = 0x4649;
  static constexpr std::uint64_t kForecastTag = 0x464f;
  static constexpr std::uint64_t kNonceTag = 0x4e4f;
  static constexpr std::size_t kRecentRounds = 36;
  static constexpr std::size_t kReportTaps = 36;
  static constexpr std::size_t kMinReportRounds = 10;

  struct Pending {
    Bit computer = 0;
    std::string nonce;
    std::string hash;
  };

  std::string id_;
  GameConfig config_;
  std::size_t choice_ = 0;
  SessionStatus status_ = SessionStatus::active;
  int balance_ = 0;
  std::vector<Bit> history_;
  std::vector<RoundRecord> records_;
  std::optional<Pending> pending_;
};

/// Sessions by id. Operations on one session are serialized by its own
/// mutex; distinct sessions proceed concurrently. With a directory set, every
/// completed round is appended to <dir>/<id>.jsonl.
class SessionStore {
 public:
  explicit SessionStore(std::uint64_t seed = 0, std::optional<std::filesystem::path> directory = std::nullopt)
      : seed_(seed), directory_(std::move(directory)) {
    if (directory_) std::filesystem::create_directories(*directory_);
  }

  /// Sessions without an explicit seed get one derived from the store seed.
  std::string create(GameConfig config, bool has_seed) {
    std::unique_lock lock(mutex_);
    const std::uint64_t n = counter_++;
    if (!has_seed) config.seed = derive_seed(seed_, {n});
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(derive_seed(seed_, {0x4944, n})));
    std::string id = buf;
    sessions_.emplace(id, std::make_shared<Entry>(id, std::move(config)));
    return id;
  }

  bool contains(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return sessions_.count(id) > 0;
  }

  /// Runs fn(session) under the session's lock. Throws std::out_of_range for
  /// an unknown id.
  template <class Fn>
  auto with_session(const std::string& id, Fn&& fn) {
    std::shared_ptr<Entry> e;
    {
      std::shared_lock lock(mutex_);
      auto it = sessions_.find(id);
      if (it == sessions_.end()) throw std::out_of_range("unknown session '" + id + "'");
      e = it->second;
    }
    std::lock_guard lock(e->mutex);
    return fn(e->session);
  }

  RoundRecord play(const std::string& id, Bit human) {
    return with_session(id, [&](GameSession& s) {
      RoundRecord r = s.play(human);
      if (directory_) {
        std::ofstream out(*directory_ / (id + ".jsonl"), std::ios::app);
        out << to_json(r).dump() << '\n';
      }
      return r;
    });
  }

 private:
  struct Entry {
    Entry(std::string id, GameConfig config) : session(std::move(id), std::move(config)) {}
    std::mutex mutex;
    GameSession session;
  };

  std::uint64_t seed_;
  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  std::uint64_t counter_ = 0;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace bitpredict
