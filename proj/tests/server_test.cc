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

#include <thread>

#include "doctest.h"
#include "forge/server.h"
#include "json.hpp"
#include "world.h"

using namespace forge;
using namespace forge::testing;
using nlohmann::json;

namespace {

struct Rig {
  explicit Rig(const World& w)
      : parser(w.machine, w.grammar, w.lexicon),
        rt{w.machine, w.grammar, w.db, parser, default_policy(w.machine), {}},
        service(rt) {}
  GrammarParser parser;
  AgentRuntime rt;
  ChatService service;
};

json ok(const HttpReply& r) {
  REQUIRE_MESSAGE(r.status == 200, r.body);
  return json::parse(r.body);
}

std::string message(const std::string& text) { return json{{"text", text}}.dump(); }

const std::vector<std::string> kScript = {"hello", "i am looking for indian food",
                                          "i like curry prince", "what is the phone number",
                                          "bye"};

}  // namespace

TEST_SUITE("server") {
  TEST_CASE("routes") {
    Rig rig(five_world());
    ChatService& svc = rig.service;
    const json opened = ok(svc.handle("POST", "/api/session", "{\"seed\": 4}"));
    const std::string id = opened.at("session_id");
    CHECK(id == "s000001");
    CHECK_FALSE(opened.at("reply").get<std::string>().empty());
    CHECK(opened.at("ended") == false);

    const json step = ok(svc.handle("POST", "/api/session/" + id + "/message", message("hello")));
    CHECK(step.at("user_state") == "Greet:");
    CHECK(step.at("ended") == false);
    const json state = ok(svc.handle("GET", "/api/session/" + id + "/state", ""));
    CHECK(state.at("turns") == 1);
    CHECK(state.at("reply") == step.at("reply"));

    const json bye = ok(svc.handle("POST", "/api/session/" + id + "/message", message("bye")));
    CHECK(bye.at("ended") == true);
    CHECK(svc.handle("POST", "/api/session/" + id + "/message", message("hi")).status == 409);
    CHECK(ok(svc.handle("GET", "/api/session/" + id + "/state", "")).at("ended") == true);

    CHECK(svc.num_sessions() == 1);
    ok(svc.handle("DELETE", "/api/session/" + id, ""));
    CHECK(svc.num_sessions() == 0);
    CHECK(svc.handle("GET", "/api/session/" + id + "/state", "").status == 404);
  }

  TEST_CASE("request errors") {
    Rig rig(five_world());
    ChatService& svc = rig.service;
    CHECK(svc.handle("POST", "/api/session", "{}").status == 400);
    CHECK(svc.handle("POST", "/api/session", "{\"seed\": -1}").status == 400);
    CHECK(svc.handle("POST", "/api/session", "not json").status == 400);
    CHECK(svc.handle("GET", "/api/session", "").status == 405);
    CHECK(svc.handle("GET", "/api/nothing", "").status == 404);
    CHECK(svc.handle("GET", "/api/session/s999999/state", "").status == 404);
    const std::string id = ok(svc.handle("POST", "/api/session", "{\"seed\": 1}")).at("session_id");
    CHECK(svc.handle("POST", "/api/session/" + id + "/message", "{}").status == 400);
    CHECK(svc.handle("GET", "/api/session/" + id + "/message", "").status == 405);
    CHECK(svc.handle("GET", "/api/session/" + id + "/other", "").status == 404);
    const json err = json::parse(svc.handle("POST", "/api/session", "{}").body);
    CHECK(err.contains("error"));
  }

  TEST_CASE("concurrent sessions are isolated") {
    Rig rig(full_world());
    auto transcript = [&](uint64_t seed) {
      std::vector<std::string> out;
      const json opened =
          ok(rig.service.handle("POST", "/api/session", json{{"seed", seed}}.dump()));
      const std::string id = opened.at("session_id");
      out.push_back(opened.at("reply"));
      for (const auto& line : kScript) {
        const HttpReply r = rig.service.handle("POST", "/api/session/" + id + "/message",
                                               message(line));
        if (r.status != 200) break;
        const json j = json::parse(r.body);
        out.push_back(j.at("reply").get<std::string>() + " | " + j.at("context").get<std::string>());
      }
      return out;
    };
    std::vector<std::vector<std::string>> expected;
    for (uint64_t seed = 0; seed < 8; ++seed) expected.push_back(transcript(seed));

    std::vector<std::vector<std::string>> got(8);
    std::vector<std::thread> threads;
    for (uint64_t seed = 0; seed < 8; ++seed) {
      threads.emplace_back([&, seed] {
        for (int rep = 0; rep < 5; ++rep) {
          auto t = transcript(seed);
          if (rep == 0) got[seed] = t;
          if (t != got[seed]) got[seed].push_back("diverged");
        }
      });
    }
    for (auto& t : threads) t.join();
    CHECK(got == expected);
    CHECK(rig.service.num_sessions() == 8 + 8 * 5);
  }
}
