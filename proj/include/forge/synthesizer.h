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

// Working-set dialogue synthesis over the state machine.
//
// Every dialogue draws from its own generator seeded from (seed, id), so the
// corpus does not depend on the number of workers or the working-set size.

#ifndef FORGE_SYNTHESIZER_H_
#define FORGE_SYNTHESIZER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "forge/engine.h"
#include "forge/state_machine.h"
#include "forge/templates.h"

namespace forge {

struct SynthConfig {
  uint64_t num_dialogues = 100;
  uint64_t working_set_size = 100;
  uint64_t max_turns = 8;
  uint64_t seed = 0;
  double p_fail = 0.1;
  // Share of dialogues in which complete actions wait for a confirmation.
  double confirm_rate = 0.5;
  // Choice weights among applicable rules and followups: exp(-rank / t),
  // rank being the position in policy or followup order. t <= 0 is uniform.
  double temperature = 0.0;
  unsigned workers = 1;
};

struct TurnRecord {
  uint64_t turn = 0;
  Context context;       // agent-facing, before the agent speaks
  std::string agent_rule;
  AgentState agent_state;
  std::string agent_utterance;
  Context user_context;  // with the agent state attached
  std::string user_tag;
  std::string user_utterance;
  UserState user_state;
  Context next_context;
};

struct DialogueRecord {
  std::string id;  // "d000042"
  bool confirm_actions = false;
  std::vector<TurnRecord> turns;
};

std::string dialogue_id(uint64_t index);

struct SynthInputs {
  const MachineSpec& machine;
  const Grammar& grammar;
  const Database& db;
  const Lexicon& lexicon;
};

// Synthesizes one dialogue; exposed for tests.
DialogueRecord synthesize_dialogue(const SynthInputs& in, const SynthConfig& cfg,
                                   uint64_t index);

// Calls `emit` once per dialogue in id order.
void synthesize(const SynthInputs& in, const SynthConfig& cfg,
                const std::function<void(const DialogueRecord&)>& emit);

// JSON lines for the three output files.
std::string dialogue_json(const DialogueRecord& d);
std::vector<std::string> user_lines(const DialogueRecord& d);
std::vector<std::string> agent_lines(const DialogueRecord& d);

struct SynthSummary {
  uint64_t dialogues = 0;
  uint64_t turns = 0;
  std::map<std::string, uint64_t> rule_counts;
  std::map<std::string, uint64_t> followup_counts;
  std::map<std::string, uint64_t> agent_act_counts;
};

// Writes user.jsonl, agent.jsonl, dialogues.jsonl and signature.json into
// `out_dir` (created if missing).
SynthSummary synthesize_to_dir(const SynthInputs& in, const SynthConfig& cfg,
                               const std::string& out_dir);

}  // namespace forge

#endif  // FORGE_SYNTHESIZER_H_
