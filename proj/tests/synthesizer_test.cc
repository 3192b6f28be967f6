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

#include <filesystem>

#include "doctest.h"
#include "forge/parser.h"
#include "forge/synthesizer.h"
#include "world.h"

using namespace forge;
using namespace forge::testing;

namespace {

SynthInputs inputs(const World& w) { return {w.machine, w.grammar, w.db, w.lexicon}; }

std::vector<std::string> run(const World& w, SynthConfig cfg) {
  std::vector<std::string> out;
  synthesize(inputs(w), cfg, [&](const DialogueRecord& d) { out.push_back(dialogue_json(d)); });
  return out;
}

}  // namespace

TEST_SUITE("synthesizer") {
  TEST_CASE("output does not depend on workers or working set") {
    const World& w = full_world();
    SynthConfig cfg;
    cfg.num_dialogues = 60;
    cfg.seed = 9;
    const auto base = run(w, cfg);
    REQUIRE(base.size() == 60);
    for (unsigned workers : {2u, 4u}) {
      for (uint64_t set : {1u, 7u, 200u}) {
        SynthConfig c = cfg;
        c.workers = workers;
        c.working_set_size = set;
        CHECK_MESSAGE(run(w, c) == base, "workers=" << workers << " set=" << set);
      }
    }
    SynthConfig other = cfg;
    other.seed = 10;
    CHECK(run(w, other) != base);
    CHECK(dialogue_json(synthesize_dialogue(inputs(w), cfg, 17)) == base[17]);
  }

  TEST_CASE("turn records chain and satisfy invariants") {
    const World& w = full_world();
    GrammarParser parser(w.machine, w.grammar, w.lexicon);
    SynthConfig cfg;
    cfg.num_dialogues = 150;
    cfg.seed = 3;
    cfg.max_turns = 10;
    size_t turns = 0;
    synthesize(inputs(w), cfg, [&](const DialogueRecord& d) {
      REQUIRE(!d.turns.empty());
      CHECK(d.turns.size() <= cfg.max_turns);
      CHECK(d.turns.front().context.is_null());
      for (size_t i = 0; i < d.turns.size(); ++i) {
        const TurnRecord& t = d.turns[i];
        ++turns;
        CHECK(t.turn == i);
        if (i + 1 < d.turns.size()) {
          CHECK(d.turns[i + 1].context == t.next_context);
          CHECK(t.user_state.act != UserAct::kEnd);
        }
        CHECK(t.user_context == attach_agent_state(t.context, t.agent_state));
        for (const Context* c : {&t.context, &t.user_context, &t.next_context}) {
          const auto errors = check_context(*c, w.schemas);
          CHECK_MESSAGE(errors.empty(), d.id << " turn " << i << ": " << errors.front());
          const std::string text = linearize(*c);
          CHECK(linearize(delinearize_context(text, w.schemas)) == text);
        }
        CHECK(check_agent_state(t.agent_state, w.schemas).empty());
        CHECK(check_user_state(t.user_state, w.schemas).empty());
        CHECK(w.machine.rule(t.agent_rule));
        CHECK(w.machine.rule(t.agent_rule)->act == t.agent_state.act);
        const UserState parsed = parser.parse(t.user_context, t.user_utterance);
        CHECK_MESSAGE(states_equal(parsed, t.user_state),
                      d.id << " turn " << i << ": " << t.user_utterance);
      }
      CHECK(user_lines(d).size() == d.turns.size());
      CHECK(agent_lines(d).size() == d.turns.size());
    });
    CHECK(turns > 300);
  }

  TEST_CASE("synthesize_to_dir writes consistent files") {
    const World& w = five_world();
    const auto dir = std::filesystem::temp_directory_path() / "forge_synth_test";
    std::filesystem::remove_all(dir);
    SynthConfig cfg;
    cfg.num_dialogues = 25;
    cfg.seed = 4;
    const SynthSummary s = synthesize_to_dir(inputs(w), cfg, dir.string());
    CHECK(s.dialogues == 25);
    CHECK(read_lines((dir / "dialogues.jsonl").string()).size() == 25);
    CHECK(read_lines((dir / "user.jsonl").string()).size() == s.turns);
    CHECK(read_lines((dir / "agent.jsonl").string()).size() == s.turns);
    CHECK(std::filesystem::exists(dir / "signature.json"));
    uint64_t rules = 0, acts = 0;
    for (const auto& [k, v] : s.rule_counts) rules += v;
    for (const auto& [k, v] : s.agent_act_counts) acts += v;
    CHECK(rules == s.turns);
    CHECK(acts == s.turns);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("ids") {
    CHECK(dialogue_id(0) == "d000000");
    CHECK(dialogue_id(42) == "d000042");
  }
}
