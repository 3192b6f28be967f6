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

// The live dialogue loop. A session alternates agent and user turns: the
// user utterance is parsed against the context with the last agent state
// attached, statements run against the database, and the policy picks the
// next agent turn.

#ifndef FORGE_AGENT_H_
#define FORGE_AGENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/engine.h"
#include "forge/parser.h"
#include "forge/state_machine.h"
#include "forge/templates.h"
#include "forge/toc.h"

namespace forge {

inline constexpr std::string_view kClarification = "Sorry , I did not understand that .";
inline constexpr std::string_view kGoodbye = "Thank you for using our service . Goodbye !";

struct AgentConfig {
  ExecMode mode = ExecMode::kLive;
  double p_fail = 0.0;  // simulate mode only
  bool confirm_actions = false;
};

// Everything sessions share; immutable once built. All references must
// outlive it. The parser must tolerate concurrent calls if sessions run in
// parallel (the grammar parser does).
struct AgentRuntime {
  const MachineSpec& machine;
  const Grammar& grammar;
  const Database& db;
  ParserHandle& parser;
  Policy policy;
  AgentConfig config;
};

struct StepResult {
  std::string reply;
  std::optional<AgentState> agent_state;  // none once the user ended
  UserState user_state;
  Context context;  // user-facing context after the step
  bool ended = false;
};

class Session {
 public:
  // Runs the opening agent turn.
  Session(const AgentRuntime& rt, std::string id, uint64_t seed);

  // Throws Error(kState) once the session has ended.
  StepResult step(std::string_view utterance);

  const std::string& id() const { return id_; }
  const std::string& opening() const { return opening_; }
  bool ended() const { return ended_; }
  uint64_t invalid_turns() const { return invalid_turns_; }
  uint64_t consecutive_invalid() const { return consecutive_invalid_; }
  const std::vector<DialogueTurn>& history() const { return history_; }
  // The context the next utterance is parsed against; the final context once
  // ended.
  Context user_context() const;
  const AgentState& agent_state() const { return a_; }
  const std::string& last_reply() const { return last_reply_; }

 private:
  void agent_turn();

  const AgentRuntime& rt_;
  std::string id_;
  Rng rng_;
  Context r_;  // agent-facing context at the last agent turn
  AgentState a_;
  std::string opening_;
  std::string last_reply_;
  std::vector<DialogueTurn> history_;
  bool ended_ = false;
  uint64_t invalid_turns_ = 0;
  uint64_t consecutive_invalid_ = 0;
};

// A user that picks followups of the current agent state and speaks them
// through the templates, so every turn also exercises the parser.
struct SimulatorConfig {
  uint64_t max_turns = 30;
  // Favor followups that move toward completing an action.
  bool cooperative = true;
};

struct Episode {
  std::vector<std::string> transcript;  // "A: ..." / "U: ..." lines
  std::vector<std::string> user_tags;
  uint64_t turns = 0;
  bool user_ended = false;
  bool accepted_proposal = false;
  bool action_success = false;
  bool parse_mismatch = false;  // the agent understood something else
};

Episode simulate_episode(const AgentRuntime& rt, const Lexicon& lex, uint64_t seed,
                         const SimulatorConfig& cfg = {});

}  // namespace forge

#endif  // FORGE_AGENT_H_
