// Copyright 2026 The Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "forge/server.h"

#include <cstdio>
#include <filesystem>

#include "forge/linearize.h"
#include "httplib.h"
#include "json.hpp"

namespace forge {

namespace {

using nlohmann::json;

HttpReply reply(int status, const json& j) { return {status, j.dump()}; }
HttpReply error(int status, const std::string& message) {
  return reply(status, json{{"error", message}});
}

// "/api/session/ID[/rest]" -> (ID, rest)
bool split_session_path(std::string_view path, std::string& id, std::string& rest) {
  constexpr std::string_view kPrefix = "/api/session/";
  if (path.substr(0, kPrefix.size()) != kPrefix) return false;
  path.remove_prefix(kPrefix.size());
  const size_t slash = path.find('/');
  id = std::string(path.substr(0, slash));
  rest = slash == std::string_view::npos ? "" : std::string(path.substr(slash + 1));
  return !id.empty();
}

}  // namespace

std::string session_state_json(const Session& s) {
  return json{{"session_id", s.id()},
              {"context", linearize(s.user_context())},
              {"agent_state", s.ended() ? "" : linearize(s.agent_state())},
              {"reply", s.last_reply()},
              {"turns", s.history().size()},
              {"invalid_turns", s.invalid_turns()},
              {"consecutive_invalid", s.consecutive_invalid()},
              {"ended", s.ended()}}
      .dump();
}

std::string step_result_json(const Session& s, const StepResult& r) {
  return json{{"reply", r.reply},
              {"agent_state", r.agent_state ? linearize(*r.agent_state) : ""},
              {"user_state", linearize(r.user_state)},
              {"context", linearize(r.context)},
              {"invalid_turns", s.invalid_turns()},
              {"ended", r.ended}}
      .dump();
}

size_t ChatService::num_sessions() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

std::shared_ptr<ChatService::Entry> ChatService::find(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

HttpReply ChatService::handle(std::string_view method, std::string_view path,
                              std::string_view body) {
  json req;
  if (method == "POST") {
    req = json::parse(body.empty() ? std::string_view("{}") : body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return error(400, "body must be a JSON object");
  }

  if (path == "/api/session") {
    if (method != "POST") return error(405, "use POST");
    if (!req.contains("seed") || !req["seed"].is_number_unsigned()) {
      return error(400, "seed must be a non-negative integer");
    }
    auto entry = std::make_shared<Entry>();
    std::string id;
    {
      std::lock_guard<std::mutex> lock(mu_);
      char buf[32];
      std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
      id = buf;
    }
    entry->session = std::make_unique<Session>(rt_, id, req["seed"].get<uint64_t>());
    std::string out = session_state_json(*entry->session);
    {
      std::lock_guard<std::mutex> lock(mu_);
      sessions_.emplace(id, std::move(entry));
    }
    return {200, std::move(out)};
  }

  std::string id, rest;
  if (!split_session_path(path, id, rest)) return error(404, "no such route");
  auto entry = find(id);
  if (!entry) return error(404, "unknown session " + id);

  if (rest.empty()) {
    if (method != "DELETE") return error(405, "use DELETE");
    std::lock_guard<std::mutex> lock(mu_);
    sessions_.erase(id);
    return reply(200, json{{"deleted", id}});
  }
  if (rest == "state") {
    if (method != "GET") return error(405, "use GET");
    std::lock_guard<std::mutex> lock(entry->mu);
    return {200, session_state_json(*entry->session)};
  }
  if (rest == "message") {
    if (method != "POST") return error(405, "use POST");
    if (!req.contains("text") || !req["text"].is_string()) return error(400, "text is required");
    std::lock_guard<std::mutex> lock(entry->mu);
    Session& s = *entry->session;
    if (s.ended()) return error(409, "session " + id + " has ended");
    StepResult r = s.step(req["text"].get<std::string>());
    return {200, step_result_json(s, r)};
  }
  return error(404, "no such route");
}

void run_server(ChatService& service, const ServerConfig& cfg) {
  httplib::Server server;
  if (!cfg.static_dir.empty()) {
    if (!std::filesystem::is_directory(cfg.static_dir) ||
        !server.set_mount_point("/", cfg.static_dir)) {
      throw Error(ErrorKind::kIo, "static directory not found: " + cfg.static_dir);
    }
  }
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpReply r;
    try {
      r = service.handle(req.method, req.path, req.body);
    } catch (const std::exception& e) {
      r = {500, nlohmann::json{{"error", e.what()}}.dump()};
    }
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);
  server.Delete(R"(/api/.*)", forward);
  if (!server.bind_to_port(cfg.host, cfg.port)) {
    throw Error(ErrorKind::kIo,
                "cannot bind " + cfg.host + ":" + std::to_string(cfg.port) + " (port busy?)");
  }
  std::fprintf(stderr, "listening on http://%s:%d\n", cfg.host.c_str(), cfg.port);
  if (!server.listen_after_bind()) throw Error(ErrorKind::kIo, "server stopped unexpectedly");
}

}  // namespace forge
