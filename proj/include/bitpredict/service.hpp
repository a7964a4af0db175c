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

// HTTP JSON API over a SessionStore.
//
//   POST /sessions                    game config            -> 201 {id, state}
//   POST /sessions/{id}/commit                               -> {hash}
//   POST /sessions/{id}/round         {"bit": 0|1}           -> round record
//   POST /sessions/{id}/end                                  -> state
//   GET  /sessions/{id}                                      -> state
//   GET  /sessions/{id}/transcript                           -> JSONL
//   GET  /sessions/{id}/report                               -> statistics
//
// Errors come back as {"error": message} with 400 (bad input), 404 (unknown
// session) or 409 (out-of-order protocol call).

#pragma once

#include <stdexcept>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bitpredict/game.hpp"

namespace bitpredict {

namespace detail {

inline void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

/// Maps exceptions from a handler body onto HTTP statuses.
template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ProtocolError& e) {
    send_error(res, 409, e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, e.what());
  } catch (const std::out_of_range& e) {
    send_error(res, 404, e.what());
  } catch (const std::invalid_argument& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

inline nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  return nlohmann::json::parse(req.body);
}

}  // namespace detail

/// Registers the API routes on `server`. The store must outlive the server.
inline void install_routes(httplib::Server& server, SessionStore& store) {
  using detail::guarded;
  using detail::send_json;

  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Post("/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = detail::parse_body(req);
      const GameConfig config = game_config_from_json(body);
      const std::string id = store.create(config, body.contains("seed"));
      const auto state = store.with_session(id, [](GameSession& s) { return s.state(); });
      send_json(res, {{"id", id}, {"state", state}}, 201);
    });
  });

  server.Post("/sessions/:id/commit", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto hash = store.with_session(req.path_params.at("id"), [](GameSession& s) { return s.commit(); });
      send_json(res, {{"hash", hash}});
    });
  });

  server.Post("/sessions/:id/round", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = detail::parse_body(req);
      if (!body.contains("bit") || !body.at("bit").is_number_integer())
        throw std::invalid_argument("body must be {\"bit\": 0 or 1}");
      const auto bit = body.at("bit").get<int>();
      if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
      const auto record = store.play(req.path_params.at("id"), static_cast<Bit>(bit));
      const auto state = store.with_session(req.path_params.at("id"), [](GameSession& s) { return s.state(); });
      auto j = to_json(record);
      j["status"] = state.at("status");
      send_json(res, j);
    });
  });

  server.Post("/sessions/:id/end", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, store.with_session(req.path_params.at("id"), [](GameSession& s) {
        s.end();
        return s.state();
      }));
    });
  });

  server.Get("/sessions/:id", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, store.with_session(req.path_params.at("id"), [](GameSession& s) { return s.state(); }));
    });
  });

  server.Get("/sessions/:id/transcript", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& id = req.path_params.at("id");
      res.set_content(store.with_session(id, [](GameSession& s) { return s.transcript_jsonl(); }),
                      "application/x-ndjson");
      res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".jsonl\"");
    });
  });

  server.Get("/sessions/:id/report", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, store.with_session(req.path_params.at("id"), [](GameSession& s) { return s.report(); }));
    });
  });
}

}  // namespace bitpredict
