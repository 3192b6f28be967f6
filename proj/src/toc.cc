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

#include "forge/toc.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "forge/util.h"

namespace forge {
namespace {

constexpr std::array<std::string_view, 7> kDayNames = {
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};

constexpr std::array<std::string_view, 8> kUserActNames = {
    "Greet", "Exec", "AskRecommend", "Insist", "Cancel", "End", "Invalid", "Reserved"};

constexpr std::array<std::string_view, kNumAgentActs> kAgentActNames = {
    "Init",         "Greet",       "SlotFill",    "SearchQuestion", "RecommendOne",
    "RecommendMany", "ProposeRefinedQuery", "Propose", "Confirm",  "EmptySearch",
    "ActionSuccess", "ActionError", "LearnMoreWhat", "AnythingElse", "Invalid"};

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool statement_less(const Statement& a, const Statement& b) {
  auto key = [](const Statement& s) {
    return std::make_tuple(s.is_action() ? 1 : 0, s.domain(),
                           s.is_action() ? s.as_action().action : std::string());
  };
  return key(a) < key(b);
}

Statement normalized_statement(Statement s) {
  if (s.is_query()) {
    for (auto& atom : s.as_query().filter) {
      for (auto& v : atom.values) v = v.normalized();
    }
  } else {
    for (auto& [k, v] : s.as_action().params) v = v.normalized();
  }
  canonicalize(s);
  return s;
}

void check_value(std::vector<std::string>& out, const std::string& where, const Value& v,
                 ValueKind kind) {
  if (!v.fits(kind)) {
    out.push_back(where + ": value '" + v.display() + "' is not a " +
                  std::string(value_kind_name(kind)));
  }
}

void check_result(std::vector<std::string>& out, const std::string& where,
                  const ExecResult& r) {
  if (r.count == 0 && r.first) out.push_back(where + ": empty result with a first row");
  if (r.error && r.count != 0) out.push_back(where + ": error result with non-zero count");
}

}  // namespace

std::string_view day_name(Day d) { return kDayNames[static_cast<int>(d)]; }

std::optional<Day> parse_day(std::string_view s) {
  const std::string l = to_lower(s);
  for (size_t i = 0; i < kDayNames.size(); ++i) {
    if (l == kDayNames[i] || (l.size() == 3 && kDayNames[i].substr(0, 3) == l)) {
      return static_cast<Day>(i);
    }
  }
  return std::nullopt;
}

std::string format_time(TimeOfDay t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", t.minutes / 60, t.minutes % 60);
  return buf;
}

std::optional<TimeOfDay> parse_time(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto hh = s.substr(0, colon), mm = s.substr(colon + 1);
  if (!all_digits(hh) || !all_digits(mm) || hh.size() > 2 || mm.size() != 2) return std::nullopt;
  const int h = std::stoi(std::string(hh)), m = std::stoi(std::string(mm));
  if (h > 23 || m > 59) return std::nullopt;
  return TimeOfDay{h * 60 + m};
}

std::string Value::display() const {
  struct {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(int64_t i) const { return std::to_string(i); }
    std::string operator()(TimeOfDay t) const { return format_time(t); }
    std::string operator()(Day d) const { return std::string(day_name(d)); }
    std::string operator()(Dontcare) const { return "dontcare"; }
  } visitor;
  return std::visit(visitor, v_);
}

Value Value::normalized() const {
  if (is_str()) {
    // Collapse internal whitespace runs as well.
    return Value::str(join(split_ws(to_lower(as_str())), " "));
  }
  return *this;
}

bool Value::fits(ValueKind kind) const {
  if (is_dontcare()) return true;
  switch (kind) {
    case ValueKind::kStringEnum:
    case ValueKind::kFreeString: return is_str();
    case ValueKind::kInteger: return is_int();
    case ValueKind::kTimeOfDay: return is_time();
    case ValueKind::kDayOfWeek: return is_day();
  }
  return false;
}

std::optional<Value> value_from_text(ValueKind kind, std::string_view text) {
  const std::string t = trim(text);
  switch (kind) {
    case ValueKind::kStringEnum:
    case ValueKind::kFreeString:
      if (t.empty()) return std::nullopt;
      return Value::str(t);
    case ValueKind::kInteger:
      if (!all_digits(t) || t.size() > 9) return std::nullopt;
      return Value::integer(std::stoll(t));
    case ValueKind::kTimeOfDay: {
      auto tm = parse_time(t);
      if (!tm) return std::nullopt;
      return Value::time(*tm);
    }
    case ValueKind::kDayOfWeek: {
      auto d = parse_day(t);
      if (!d) return std::nullopt;
      return Value::day(*d);
    }
  }
  return std::nullopt;
}

std::string_view filter_op_symbol(FilterOp op) {
  switch (op) {
    case FilterOp::kEq: return "=";
    case FilterOp::kNeq: return "!=";
    case FilterOp::kLt: return "<";
    case FilterOp::kGt: return ">";
    case FilterOp::kLeq: return "<=";
    case FilterOp::kGeq: return ">=";
  }
  return "=";
}

std::optional<FilterOp> parse_filter_op(std::string_view s) {
  if (s == "=") return FilterOp::kEq;
  if (s == "!=") return FilterOp::kNeq;
  if (s == "<") return FilterOp::kLt;
  if (s == ">") return FilterOp::kGt;
  if (s == "<=") return FilterOp::kLeq;
  if (s == ">=") return FilterOp::kGeq;
  return std::nullopt;
}

const FilterAtom* QueryStatement::atom(std::string_view slot) const {
  for (const auto& a : filter) {
    if (a.slot == slot) return &a;
  }
  return nullptr;
}

std::vector<std::string> QueryStatement::constrained_slots() const {
  std::vector<std::string> out;
  for (const auto& a : filter) {
    if (!a.is_dontcare()) out.push_back(a.slot);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void QueryStatement::canonicalize() {
  for (auto& a : filter) {
    std::sort(a.values.begin(), a.values.end());
    a.values.erase(std::unique(a.values.begin(), a.values.end()), a.values.end());
  }
  std::sort(filter.begin(), filter.end(), [](const FilterAtom& a, const FilterAtom& b) {
    return std::tie(a.slot, a.op) < std::tie(b.slot, b.op);
  });
}

std::vector<std::string> ActionStatement::missing_required(const SchemaSet& schemas) const {
  std::vector<std::string> out;
  const DomainSchema* d = schemas.domain(domain);
  if (!d) return out;
  const ActionSchema* a = d->action(action);
  if (!a) return out;
  for (const auto& p : a->params) {
    if (!p.required) continue;
    auto it = params.find(p.name);
    if (it == params.end() || it->second.is_dontcare()) out.push_back(p.name);
  }
  return out;
}

bool ActionStatement::complete(const SchemaSet& schemas) const {
  return missing_required(schemas).empty();
}

Statement Statement::query(QueryStatement q, StatementStatus s) {
  Statement out;
  out.body = std::move(q);
  out.status = s;
  return out;
}

Statement Statement::action(ActionStatement a, StatementStatus s) {
  Statement out;
  out.body = std::move(a);
  out.status = s;
  return out;
}

const std::string& Statement::domain() const {
  return is_query() ? as_query().domain : as_action().domain;
}

bool Statement::complete(const SchemaSet& schemas) const {
  return is_query() || as_action().complete(schemas);
}

std::string_view user_act_name(UserAct a) { return kUserActNames[static_cast<int>(a)]; }
std::string_view agent_act_name(AgentAct a) { return kAgentActNames[static_cast<int>(a)]; }

std::optional<UserAct> parse_user_act(std::string_view s) {
  for (size_t i = 0; i < kUserActNames.size(); ++i) {
    if (kUserActNames[i] == s) return static_cast<UserAct>(i);
  }
  return std::nullopt;
}

std::optional<AgentAct> parse_agent_act(std::string_view s) {
  for (size_t i = 0; i < kAgentActNames.size(); ++i) {
    if (kAgentActNames[i] == s) return static_cast<AgentAct>(i);
  }
  return std::nullopt;
}

bool Context::is_null() const {
  return last_act.is(AgentAct::kInit) && !focus && domains.empty() && carryover.empty() &&
         agent.empty();
}

const Statement* Context::executed_query(std::string_view domain) const {
  auto it = domains.find(std::string(domain));
  if (it == domains.end() || !it->second.query) return nullptr;
  return &*it->second.query;
}

const Statement* Context::executed_action(std::string_view domain) const {
  auto it = domains.find(std::string(domain));
  if (it == domains.end() || !it->second.action) return nullptr;
  return &*it->second.action;
}

const Statement* Context::pending_action(std::string_view domain) const {
  for (const auto& s : carryover) {
    if (s.is_action() && s.domain() == domain) return &s;
  }
  return nullptr;
}

QueryStatement merge_query(const QueryStatement& prev, const QueryStatement& next,
                           const SchemaSet& schemas) {
  const DomainSchema* d = schemas.domain(next.domain);
  if (d) {
    // A query about one entity neither inherits nor is inherited from.
    auto pins = [&](const QueryStatement& q) {
      const FilterAtom* key = q.atom(d->table.entity_key);
      return key && !key->is_dontcare();
    };
    if (pins(next) || pins(prev)) {
      QueryStatement out = next;
      out.canonicalize();
      return out;
    }
  }
  QueryStatement out;
  out.domain = next.domain;
  std::set<std::string> overridden;
  for (const auto& a : next.filter) overridden.insert(a.slot);
  for (const auto& a : prev.filter) {
    if (!overridden.count(a.slot)) out.filter.push_back(a);
  }
  for (const auto& a : next.filter) out.filter.push_back(a);
  out.requested = next.requested;
  out.canonicalize();
  return out;
}

ActionStatement merge_action(const ActionStatement& prev, const ActionStatement& next) {
  ActionStatement out = prev;
  for (const auto& [k, v] : next.params) out.params[k] = v;
  return out;
}

Context advance_context(const Context& ctx, const UserState& us, Executor& exec,
                        const SchemaSet& schemas, const AdvanceOptions& opts) {
  Context out = ctx;
  out.agent = {};
  out.last_act = LastAct::user(us.act);
  for (auto& [name, rec] : out.domains) {
    rec.query_fresh = false;
    rec.action_fresh = false;
  }
  if (us.act == UserAct::kCancel || us.act == UserAct::kEnd) out.carryover.clear();
  if (us.statements.empty()) return out;

  UserState ordered = us;
  canonicalize(ordered);
  std::vector<Statement> carry;
  for (const auto& s : ordered.statements) {
    const std::string& domain = s.domain();
    if (s.is_query()) {
      QueryStatement q = s.as_query();
      if (const Statement* prev = out.executed_query(domain)) {
        q = merge_query(prev->as_query(), q, schemas);
      } else {
        q.canonicalize();
      }
      Statement executed = Statement::query(q, StatementStatus::kExecuted);
      executed.result = exec.run_query(q);
      auto& rec = out.domains[domain];
      rec.query = std::move(executed);
      rec.query_fresh = true;
    } else {
      ActionStatement a = s.as_action();
      if (const Statement* pending = ctx.pending_action(domain)) {
        if (pending->as_action().action == a.action) a = merge_action(pending->as_action(), a);
      }
      bool run = a.complete(schemas);
      if (run && opts.confirm_actions) {
        const auto& proposed = ctx.agent.proposed;
        run = ctx.last_act.is(AgentAct::kConfirm) && proposed && proposed->is_action() &&
              normalized_statement(Statement::action(proposed->as_action())) ==
                  normalized_statement(Statement::action(a));
      }
      if (!run) {
        carry.push_back(Statement::action(std::move(a)));
        continue;
      }
      Statement executed = Statement::action(a, StatementStatus::kExecuted);
      executed.result = exec.run_action(a);
      auto& rec = out.domains[domain];
      rec.action = std::move(executed);
      rec.action_fresh = true;
    }
  }
  out.carryover = std::move(carry);
  out.focus = us.statements.back().domain();
  return out;
}

Context attach_agent_state(const Context& ctx, const AgentState& as) {
  Context out = ctx;
  out.last_act = LastAct::agent(as.act);
  out.agent.requested = as.requested;
  out.agent.suggest_change = as.suggest_change;
  out.agent.proposed = as.proposed;
  return out;
}

Context agent_facing(const Context& ctx) {
  Context out = ctx;
  out.agent = {};
  return out;
}

void canonicalize(Statement& s) {
  if (s.is_query()) s.as_query().canonicalize();
}

void canonicalize(UserState& us) {
  for (auto& s : us.statements) canonicalize(s);
  std::stable_sort(us.statements.begin(), us.statements.end(), statement_less);
}

bool states_equal(const UserState& a, const UserState& b) {
  if (a.act != b.act || a.statements.size() != b.statements.size()) return false;
  std::vector<Statement> na, nb;
  for (const auto& s : a.statements) na.push_back(normalized_statement(s));
  for (const auto& s : b.statements) nb.push_back(normalized_statement(s));
  std::stable_sort(na.begin(), na.end(), statement_less);
  std::stable_sort(nb.begin(), nb.end(), statement_less);
  return na == nb;
}

std::set<SlotTriple> slots_of(const UserState& us) {
  std::set<SlotTriple> out;
  for (const auto& s : us.statements) {
    if (s.is_query()) {
      for (const auto& atom : s.as_query().filter) {
        if (atom.values.empty()) continue;
        out.insert({s.domain(), atom.slot, atom.values.front().normalized()});
      }
    } else {
      for (const auto& [k, v] : s.as_action().params) {
        out.insert({s.domain(), k, v.normalized()});
      }
    }
  }
  return out;
}

bool has_disjunction(const UserState& us) {
  for (const auto& s : us.statements) {
    if (!s.is_query()) continue;
    for (const auto& a : s.as_query().filter) {
      if (a.values.size() > 1) return true;
    }
  }
  return false;
}

std::vector<std::string> check_statement(const Statement& s, const SchemaSet& schemas) {
  std::vector<std::string> out;
  const DomainSchema* d = schemas.domain(s.domain());
  if (!d) {
    out.push_back("unknown domain '" + s.domain() + "'");
    return out;
  }
  if (s.is_query()) {
    const auto& q = s.as_query();
    std::set<std::pair<std::string, FilterOp>> seen;
    for (const auto& a : q.filter) {
      const std::string where = q.domain + "." + a.slot;
      const ColumnSpec* c = d->table.column(a.slot);
      if (!c) {
        out.push_back("unknown slot '" + where + "'");
        continue;
      }
      if (!c->filterable) out.push_back(where + ": column is not filterable");
      if (!seen.insert({a.slot, a.op}).second) out.push_back(where + ": duplicate (slot, op)");
      if (a.values.empty()) out.push_back(where + ": atom without values");
      bool has_dontcare = false;
      for (const auto& v : a.values) {
        check_value(out, where, v, c->kind);
        if (v.is_dontcare()) has_dontcare = true;
        if (a.op != FilterOp::kEq && a.op != FilterOp::kNeq && !v.is_ordered()) {
          out.push_back(where + ": comparison on a non-ordered value");
        }
      }
      if (has_dontcare && (a.op != FilterOp::kEq || a.values.size() != 1)) {
        out.push_back(where + ": dontcare must be the sole value of an '=' atom");
      }
    }
    for (const auto& r : q.requested) {
      const ColumnSpec* c = d->table.column(r);
      if (!c || !c->requestable) out.push_back(q.domain + "." + r + ": not requestable");
    }
  } else {
    const auto& a = s.as_action();
    const ActionSchema* act = d->action(a.action);
    if (!act) {
      out.push_back("unknown action '" + a.domain + "." + a.action + "'");
      return out;
    }
    for (const auto& [k, v] : a.params) {
      const ParamSpec* p = act->param(k);
      if (!p) {
        out.push_back("unknown param '" + a.action + "." + k + "'");
        continue;
      }
      check_value(out, a.action + "." + k, v, p->kind);
    }
  }
  if (s.status == StatementStatus::kExecuted) {
    if (!s.result) out.push_back(s.domain() + ": executed statement without a result");
    else check_result(out, s.domain(), *s.result);
    if (!s.complete(schemas)) out.push_back(s.domain() + ": executed an incomplete action");
  } else if (s.result) {
    out.push_back(s.domain() + ": result on a non-executed statement");
  }
  return out;
}

std::vector<std::string> check_user_state(const UserState& us, const SchemaSet& schemas) {
  std::vector<std::string> out;
  if (us.act != UserAct::kExec && us.act != UserAct::kInsist && !us.statements.empty()) {
    out.push_back(std::string(user_act_name(us.act)) + " carries statements");
  }
  for (const auto& s : us.statements) {
    if (s.status != StatementStatus::kAccepted) out.push_back("user statement not accepted");
    auto v = check_statement(s, schemas);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<std::string> check_agent_state(const AgentState& as, const SchemaSet& schemas) {
  std::vector<std::string> out;
  const std::string act(agent_act_name(as.act));
  const bool may_request = as.act == AgentAct::kSlotFill || as.act == AgentAct::kSearchQuestion;
  const bool may_suggest = as.act == AgentAct::kEmptySearch || as.act == AgentAct::kActionError;
  const bool must_propose = as.act == AgentAct::kPropose || as.act == AgentAct::kConfirm ||
                            as.act == AgentAct::kProposeRefinedQuery;
  const bool may_propose = must_propose || as.act == AgentAct::kRecommendOne ||
                           as.act == AgentAct::kRecommendMany;
  if (!may_request && !as.requested.empty()) out.push_back(act + " carries requested slots");
  if (may_request && as.requested.empty()) out.push_back(act + " requests nothing");
  if (!may_suggest && !as.suggest_change.empty()) out.push_back(act + " carries suggestions");
  if (!may_propose && as.proposed) out.push_back(act + " carries a proposal");
  if (must_propose && !as.proposed) out.push_back(act + " lacks a proposal");
  if (as.proposed) {
    if (as.proposed->status != StatementStatus::kProposed) out.push_back("proposal not proposed");
    auto v = check_statement(*as.proposed, schemas);
    out.insert(out.end(), v.begin(), v.end());
  }
  for (const auto& ref : as.requested) {
    const DomainSchema* d = schemas.domain(ref.domain);
    if (!d) out.push_back("unknown domain '" + ref.domain + "'");
  }
  return out;
}

std::vector<std::string> check_context(const Context& ctx, const SchemaSet& schemas) {
  std::vector<std::string> out;
  for (const auto& [name, rec] : ctx.domains) {
    if (!schemas.domain(name)) out.push_back("unknown domain '" + name + "'");
    if (rec.query) {
      if (!rec.query->is_query() || rec.query->domain() != name) {
        out.push_back(name + ": query slot holds a foreign statement");
      }
      if (rec.query->status != StatementStatus::kExecuted) {
        out.push_back(name + ": query not executed");
      }
      auto v = check_statement(*rec.query, schemas);
      out.insert(out.end(), v.begin(), v.end());
    }
    if (rec.action) {
      if (!rec.action->is_action() || rec.action->domain() != name) {
        out.push_back(name + ": action slot holds a foreign statement");
      }
      if (rec.action->status != StatementStatus::kExecuted) {
        out.push_back(name + ": action not executed");
      }
      auto v = check_statement(*rec.action, schemas);
      out.insert(out.end(), v.begin(), v.end());
    }
  }
  for (const auto& s : ctx.carryover) {
    if (s.status != StatementStatus::kAccepted) out.push_back("carryover not accepted");
    if (!s.is_action()) out.push_back("carryover holds a query");
    auto v = check_statement(s, schemas);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (!ctx.last_act.by_agent && !ctx.agent.empty()) {
    out.push_back("agent fields after a user act");
  }
  if (ctx.last_act.is(AgentAct::kInit) && !ctx.is_null()) {
    out.push_back("Init context is not null");
  }
  if (ctx.agent.proposed) {
    auto v = check_statement(*ctx.agent.proposed, schemas);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace forge
