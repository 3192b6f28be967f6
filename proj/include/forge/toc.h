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

// Task-oriented context: values, statements, the user/agent/result states
// and the rules that fold a user or agent state into the running context.

#ifndef FORGE_TOC_H_
#define FORGE_TOC_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "forge/schema.h"

namespace forge {

enum class Day { kMon, kTue, kWed, kThu, kFri, kSat, kSun };

std::string_view day_name(Day d);  // "monday"
std::optional<Day> parse_day(std::string_view s);  // full or 3-letter name

struct TimeOfDay {
  int minutes = 0;  // since midnight
  auto operator<=>(const TimeOfDay&) const = default;
};

std::string format_time(TimeOfDay t);  // zero-padded "hh:mm"
std::optional<TimeOfDay> parse_time(std::string_view s);

struct Dontcare {
  auto operator<=>(const Dontcare&) const = default;
};

class Value {
 public:
  using Storage = std::variant<std::string, int64_t, TimeOfDay, Day, Dontcare>;

  Value() : v_(Dontcare{}) {}
  static Value str(std::string s) { return Value(Storage(std::move(s))); }
  static Value integer(int64_t i) { return Value(Storage(i)); }
  static Value time(TimeOfDay t) { return Value(Storage(t)); }
  static Value day(Day d) { return Value(Storage(d)); }
  static Value dontcare() { return Value(Storage(Dontcare{})); }

  bool is_str() const { return std::holds_alternative<std::string>(v_); }
  bool is_int() const { return std::holds_alternative<int64_t>(v_); }
  bool is_time() const { return std::holds_alternative<TimeOfDay>(v_); }
  bool is_day() const { return std::holds_alternative<Day>(v_); }
  bool is_dontcare() const { return std::holds_alternative<Dontcare>(v_); }
  bool is_ordered() const { return is_int() || is_time(); }

  const std::string& as_str() const { return std::get<std::string>(v_); }
  int64_t as_int() const { return std::get<int64_t>(v_); }
  TimeOfDay as_time() const { return std::get<TimeOfDay>(v_); }
  Day as_day() const { return std::get<Day>(v_); }
  const Storage& storage() const { return v_; }

  // Surface form for utterances: raw string, digits, "hh:mm", day name.
  std::string display() const;
  // Case-folded, whitespace-trimmed copy used for equality checks.
  Value normalized() const;
  // Whether the value is admissible for a slot of `kind`.
  bool fits(ValueKind kind) const;

  auto operator<=>(const Value&) const = default;
  bool operator==(const Value&) const = default;

 private:
  explicit Value(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

// Parses a surface form according to the slot kind. Returns nullopt when the
// text is not a value of that kind.
std::optional<Value> value_from_text(ValueKind kind, std::string_view text);

enum class FilterOp { kEq, kNeq, kLt, kGt, kLeq, kGeq };

std::string_view filter_op_symbol(FilterOp op);
std::optional<FilterOp> parse_filter_op(std::string_view s);

struct FilterAtom {
  std::string slot;
  FilterOp op = FilterOp::kEq;
  std::vector<Value> values;  // more than one value means "either of"

  bool is_dontcare() const { return values.size() == 1 && values[0].is_dontcare(); }
  auto operator<=>(const FilterAtom&) const = default;
  bool operator==(const FilterAtom&) const = default;
};

using Row = std::map<std::string, Value>;

struct QueryStatement {
  std::string domain;
  std::vector<FilterAtom> filter;  // conjunction
  std::set<std::string> requested;  // projection

  const FilterAtom* atom(std::string_view slot) const;
  // Slots constrained by a non-dontcare atom.
  std::vector<std::string> constrained_slots() const;
  void canonicalize();  // sort atoms by (slot, op)
  bool operator==(const QueryStatement&) const = default;
};

struct ActionStatement {
  std::string domain;
  std::string action;
  std::map<std::string, Value> params;

  bool complete(const SchemaSet& schemas) const;
  std::vector<std::string> missing_required(const SchemaSet& schemas) const;
  bool operator==(const ActionStatement&) const = default;
};

enum class StatementStatus { kProposed, kAccepted, kExecuted };

struct ExecError {
  std::string code;   // missing_entity | unavailable_slot_value | invalid_param
  std::string param;  // offending parameter or slot, may be empty
  bool operator==(const ExecError&) const = default;
};

struct ExecResult {
  uint64_t count = 0;
  std::optional<Row> first;
  std::optional<ExecError> error;
  bool operator==(const ExecResult&) const = default;
};

struct Statement {
  std::variant<QueryStatement, ActionStatement> body;
  StatementStatus status = StatementStatus::kAccepted;
  std::optional<ExecResult> result;  // set iff status == kExecuted

  static Statement query(QueryStatement q, StatementStatus s = StatementStatus::kAccepted);
  static Statement action(ActionStatement a, StatementStatus s = StatementStatus::kAccepted);

  bool is_query() const { return std::holds_alternative<QueryStatement>(body); }
  bool is_action() const { return std::holds_alternative<ActionStatement>(body); }
  const QueryStatement& as_query() const { return std::get<QueryStatement>(body); }
  const ActionStatement& as_action() const { return std::get<ActionStatement>(body); }
  QueryStatement& as_query() { return std::get<QueryStatement>(body); }
  ActionStatement& as_action() { return std::get<ActionStatement>(body); }
  const std::string& domain() const;
  bool complete(const SchemaSet& schemas) const;
  bool operator==(const Statement&) const = default;
};

// Seven named user acts plus one reserved code. Only six named acts plus
// Invalid are defined; kReserved is never produced by the built-in machine.
enum class UserAct { kGreet, kExec, kAskRecommend, kInsist, kCancel, kEnd, kInvalid, kReserved };

enum class AgentAct {
  kInit,
  kGreet,
  kSlotFill,
  kSearchQuestion,
  kRecommendOne,
  kRecommendMany,
  kProposeRefinedQuery,
  kPropose,
  kConfirm,
  kEmptySearch,
  kActionSuccess,
  kActionError,
  kLearnMoreWhat,
  kAnythingElse,
  kInvalid,
};

inline constexpr int kNumAgentActs = 15;

std::string_view user_act_name(UserAct a);
std::string_view agent_act_name(AgentAct a);
std::optional<UserAct> parse_user_act(std::string_view s);
std::optional<AgentAct> parse_agent_act(std::string_view s);

struct SlotRef {
  std::string domain;
  std::string slot;
  auto operator<=>(const SlotRef&) const = default;
};

struct UserState {
  UserAct act = UserAct::kInvalid;
  std::vector<Statement> statements;  // status kAccepted
  bool operator==(const UserState&) const = default;
};

struct AgentState {
  AgentAct act = AgentAct::kInit;
  std::set<SlotRef> requested;       // SlotFill, SearchQuestion
  std::set<SlotRef> suggest_change;  // EmptySearch, ActionError
  std::optional<Statement> proposed;  // Propose, Confirm, RecommendOne/Many
  bool operator==(const AgentState&) const = default;
};

// Whoever spoke last. A null context carries the agent's Init act.
struct LastAct {
  bool by_agent = true;
  int code = static_cast<int>(AgentAct::kInit);

  static LastAct user(UserAct a) { return {false, static_cast<int>(a)}; }
  static LastAct agent(AgentAct a) { return {true, static_cast<int>(a)}; }
  bool is(UserAct a) const { return !by_agent && code == static_cast<int>(a); }
  bool is(AgentAct a) const { return by_agent && code == static_cast<int>(a); }
  bool operator==(const LastAct&) const = default;
};

// Latest executed query and action of one domain. `*_fresh` marks statements
// executed while folding in the most recent user state.
struct DomainRecord {
  std::optional<Statement> query;
  std::optional<Statement> action;
  bool query_fresh = false;
  bool action_fresh = false;
  bool operator==(const DomainRecord&) const = default;
};

struct AgentFields {
  std::set<SlotRef> requested;
  std::set<SlotRef> suggest_change;
  std::optional<Statement> proposed;
  bool empty() const { return requested.empty() && suggest_change.empty() && !proposed; }
  bool operator==(const AgentFields&) const = default;
};

struct Context {
  LastAct last_act;
  std::optional<std::string> focus;  // domain of the most recent statement
  std::map<std::string, DomainRecord> domains;
  std::vector<Statement> carryover;  // incomplete or held statements
  AgentFields agent;                 // only in user-facing contexts

  bool is_null() const;
  const Statement* executed_query(std::string_view domain) const;
  const Statement* executed_action(std::string_view domain) const;
  const Statement* pending_action(std::string_view domain) const;
  bool operator==(const Context&) const = default;
};

struct DialogueTurn {
  Context r;
  AgentState a;
  UserState u;
  Context r_next;
};

// Executes statements while the context advances.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecResult run_query(const QueryStatement& q) = 0;
  virtual ExecResult run_action(const ActionStatement& a) = 0;
};

struct AdvanceOptions {
  // Hold complete actions until the user accepts an agent Confirm of the
  // identical statement.
  bool confirm_actions = false;
};

// Merges `next` over `prev` (same domain): atoms on the same slot are
// replaced, other atoms inherited. If either query pins the entity key,
// `next` replaces the previous query outright.
QueryStatement merge_query(const QueryStatement& prev, const QueryStatement& next,
                           const SchemaSet& schemas);
ActionStatement merge_action(const ActionStatement& prev, const ActionStatement& next);

Context advance_context(const Context& ctx, const UserState& us, Executor& exec,
                        const SchemaSet& schemas, const AdvanceOptions& opts = {});
Context attach_agent_state(const Context& ctx, const AgentState& as);
// Drops agent fields: the context the agent sees before it speaks.
Context agent_facing(const Context& ctx);

// Structural equality after value normalization and canonical ordering.
bool states_equal(const UserState& a, const UserState& b);

struct SlotTriple {
  std::string domain;
  std::string slot;
  Value value;
  auto operator<=>(const SlotTriple&) const = default;
};
// Provided (domain, slot, value) triples; a disjunction contributes its first
// value. Values are normalized.
std::set<SlotTriple> slots_of(const UserState& us);
bool has_disjunction(const UserState& us);

// Invariant checks. Each returns human-readable violations, empty if valid.
std::vector<std::string> check_statement(const Statement& s, const SchemaSet& schemas);
std::vector<std::string> check_user_state(const UserState& us, const SchemaSet& schemas);
std::vector<std::string> check_agent_state(const AgentState& as, const SchemaSet& schemas);
std::vector<std::string> check_context(const Context& ctx, const SchemaSet& schemas);

// Canonical ordering applied by linearization: queries before actions,
// domains alphabetical, atoms by slot.
void canonicalize(UserState& us);
void canonicalize(Statement& s);

}  // namespace forge

#endif  // FORGE_TOC_H_
