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

// The transaction dialogue state machine. Agent rules are checked against
// the agent-facing context; each agent act has a list of user followups,
// whose semantics turn a template derivation into a user state.

#ifndef FORGE_STATE_MACHINE_H_
#define FORGE_STATE_MACHINE_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/schema.h"
#include "forge/templates.h"
#include "forge/toc.h"
#include "forge/util.h"

namespace forge {

class Database;

struct Thresholds {
  uint64_t many = 5;  // more results than this: ask or refine
};

struct TransitionRule {
  std::string name;
  AgentAct act = AgentAct::kInit;
  std::string precondition;  // human-readable, for describe()
  std::function<bool(const Context&)> applicable;
  std::function<AgentState(const Context&, Rng&)> agent_semantics;
  std::string agent_template_tag;
  std::vector<std::string> user_followups;
};

struct UserTransition {
  std::string tag;
  UserAct act = UserAct::kExec;  // act of the produced state
  std::string precondition;
  // Whether the followup is on offer at all (e.g. a proposal exists).
  std::function<bool(const Context&, const AgentState&)> available;
  // Whether a production's parameters (domain, slot, action) fit the context.
  std::function<bool(const Context&, const Production&)> admits;
  std::function<std::optional<UserState>(const Context&, const AgentState&, const Derivation&)>
      semantics;
};

class MachineSpec {
 public:
  const SchemaSet& schemas() const { return *schemas_; }
  const std::vector<TransitionRule>& rules() const { return rules_; }
  const TransitionRule* rule(std::string_view name) const;
  const UserTransition* user_transition(std::string_view tag) const;
  const std::map<std::string, UserTransition, std::less<>>& user_transitions() const {
    return user_;
  }
  const Thresholds& thresholds() const { return thresholds_; }
  size_t num_agent_rules() const { return rules_.size(); }
  size_t num_user_transitions() const { return user_.size(); }
  // Distinct (rule, followup) pairs.
  size_t num_edges() const;

 private:
  friend MachineSpec builtin_transaction_machine(const SchemaSet&, const Thresholds&);
  const SchemaSet* schemas_ = nullptr;
  std::vector<TransitionRule> rules_;
  std::map<std::string, UserTransition, std::less<>> user_;
  Thresholds thresholds_;
};

// Throws Error(kValidation) for an empty schema set or a domain without a
// filterable non-key column. The schema set must outlive the machine.
MachineSpec builtin_transaction_machine(const SchemaSet& schemas,
                                        const Thresholds& thresholds = {});

// User and agent productions for the built-in machine. Tags of AGENT_TURN
// productions are rule names; tags of USER_TURN productions are followups.
Grammar builtin_grammar(const SchemaSet& schemas);

struct Policy {
  std::vector<std::string> order;  // rule names, highest priority first
};
Policy default_policy(const MachineSpec& m);

struct AgentChoice {
  const TransitionRule* rule = nullptr;
  AgentState state;
};

std::vector<const TransitionRule*> applicable_rules(const MachineSpec& m, const Context& ctx);
// First applicable rule in policy order, falling back to anything_else.
AgentChoice select_agent(const MachineSpec& m, const Policy& policy, const Context& ctx,
                         Rng& rng);

// Agent utterance for a chosen rule, from the AGENT_TURN productions tagged
// with the rule's template tag.
std::string render_agent(const MachineSpec& m, const Grammar& g, const Database& db,
                         const Context& ctx, const AgentChoice& choice, Rng& rng);

// The agent state stored in a user-facing context.
AgentState agent_state_of(const Context& ctx);

// Followups of `as` whose preconditions hold in the user-facing `ctx`.
std::vector<const UserTransition*> enumerate_user_transitions(const MachineSpec& m,
                                                              const Context& ctx,
                                                              const AgentState& as);

// Admissibility of a parse under the user-facing `ctx`, and its state.
std::optional<UserState> interpret(const MachineSpec& m, const Context& ctx,
                                   const Derivation& d);

struct UserTurn {
  std::string utterance;
  Derivation derivation;
  UserState state;
};

// Samples a production of `t` that fits `ctx` and expands it with values
// drawn from the database. Returns nullopt if no attempt yields a state.
std::optional<UserTurn> sample_user_turn(const MachineSpec& m, const Grammar& g,
                                         const Database& db, const Lexicon& lex,
                                         const Context& ctx, const UserTransition& t,
                                         Rng& rng);

// Multi-line listing of rules and followups with counts.
std::string describe(const MachineSpec& m);

}  // namespace forge

#endif  // FORGE_STATE_MACHINE_H_
