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

// Canonical token-separated serialization of states.
//
//   user    := UserAct ":" (stmt ";")*
//   agent   := AgentAct ":" ["request" refs ";"] ["change" refs ";"]
//              ["propose" stmt ";"]
//   context := ("user" UserAct | "agent" AgentAct) ":" ["focus" domain ";"]
//              (("exec" | "exec_new") stmt result ";")*
//              ("pending" stmt ";")* agent-segments
//   stmt    := [slot ("," slot)* "of"] domain "(" [atom ("," atom)*] ")"
//            | domain "." action "(" [param ("," param)*] ")"
//   atom    := slot op value ("or" value)*
//   result  := "#results" "=" n ["first" "{" col "=" value ("," ...)* "}"]
//              ["error" "=" code [param]]
//   value   := '"' text '"' | integer | hh:mm | dayname | "dontcare"
//
// Quoted text is surrounded by single spaces; '"' and '\' inside it are
// backslash-escaped.

#ifndef FORGE_LINEARIZE_H_
#define FORGE_LINEARIZE_H_

#include <string>
#include <string_view>
#include <variant>

#include "forge/schema.h"
#include "forge/toc.h"

namespace forge {

std::string linearize(const Value& v);
std::string linearize(const Statement& s);
std::string linearize(const UserState& us);
std::string linearize(const AgentState& as);
std::string linearize(const Context& ctx);

// Each throws Error(kParse) with the token index on syntax errors and
// Error(kValidation) on unknown domains, slots, actions or params.
UserState delinearize_user(std::string_view text, const SchemaSet& schemas);
AgentState delinearize_agent(std::string_view text, const SchemaSet& schemas);
// The empty string denotes the null context.
Context delinearize_context(std::string_view text, const SchemaSet& schemas);

enum class StateKind { kUser, kAgent, kContext };
using AnyState = std::variant<UserState, AgentState, Context>;
AnyState delinearize(std::string_view text, StateKind kind, const SchemaSet& schemas);

}  // namespace forge

#endif  // FORGE_LINEARIZE_H_
