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

#include "forge/state_machine.h"

#include <algorithm>
#include <sstream>

#include "forge/engine.h"
#include "state_helpers.h"

namespace forge {

const TransitionRule* MachineSpec::rule(std::string_view name) const {
  for (const auto& r : rules_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const UserTransition* MachineSpec::user_transition(std::string_view tag) const {
  auto it = user_.find(tag);
  return it == user_.end() ? nullptr : &it->second;
}

size_t MachineSpec::num_edges() const {
  size_t n = 0;
  for (const auto& r : rules_) n += r.user_followups.size();
  return n;
}

namespace {

using detail::askable_slot;
using detail::entity_in_focus;
using detail::focus_record;
using detail::key_pinned;
using detail::offer_for;

const std::map<AgentAct, std::vector<std::string>>& followup_table() {
  static const std::map<AgentAct, std::vector<std::string>> table = {
      {AgentAct::kInit,
       {"greet", "exec_new_query", "ask_about_entity", "exec_new_action", "select_entity"}},
      {AgentAct::kGreet,
       {"exec_new_query", "ask_about_entity", "exec_new_action", "select_entity", "end"}},
      {AgentAct::kSearchQuestion,
       {"answer_slot", "answer_dontcare", "refine_query", "ask_recommend", "exec_new_query",
        "switch_domain", "cancel"}},
      {AgentAct::kProposeRefinedQuery,
       {"accept_proposal", "change_proposed_slot", "reject_proposal", "ask_recommend",
        "refine_query", "switch_domain", "cancel"}},
      {AgentAct::kRecommendMany,
       {"select_entity", "ask_attribute", "refine_query", "ask_recommend", "switch_domain",
        "cancel"}},
      {AgentAct::kRecommendOne,
       {"accept_proposal", "accept_proposal_params", "reject_proposal", "ask_attribute",
        "request_action", "switch_domain", "end"}},
      {AgentAct::kLearnMoreWhat,
       {"ask_attribute", "request_action", "switch_domain", "cancel", "end"}},
      {AgentAct::kEmptySearch,
       {"change_slot", "answer_dontcare", "insist", "switch_domain", "cancel"}},
      {AgentAct::kPropose,
       {"accept_proposal", "reject_proposal", "change_proposed_slot", "switch_domain", "cancel"}},
      {AgentAct::kSlotFill, {"fill_slot", "cancel"}},
      {AgentAct::kConfirm,
       {"accept_proposal", "change_proposed_param", "reject_proposal", "switch_domain",
        "cancel"}},
      {AgentAct::kActionSuccess, {"acknowledge", "ask_attribute", "switch_domain", "end"}},
      {AgentAct::kActionError, {"change_param", "insist", "switch_domain", "cancel"}},
      {AgentAct::kAnythingElse,
       {"exec_new_query", "ask_about_entity", "exec_new_action", "select_entity",
        "switch_domain", "end"}},
  };
  return table;
}

const Statement* fresh_query(const Context& ctx) {
  const DomainRecord* rec = focus_record(ctx);
  return rec && rec->query_fresh ? &*rec->query : nullptr;
}

const Statement* fresh_action(const Context& ctx) {
  const DomainRecord* rec = focus_record(ctx);
  return rec && rec->action_fresh ? &*rec->action : nullptr;
}

uint64_t count_of(const Statement* s) { return s && s->result ? s->result->count : 0; }

const Statement* held_action(const Context& ctx, const SchemaSet& schemas, bool complete) {
  for (const auto& s : ctx.carryover) {
    if (s.is_action() && s.complete(schemas) == complete) return &s;
  }
  return nullptr;
}

bool anything_fresh(const Context& ctx) {
  for (const auto& [_, rec] : ctx.domains) {
    if (rec.query_fresh || rec.action_fresh) return true;
  }
  return false;
}

Statement proposal(Statement s) {
  s.status = StatementStatus::kProposed;
  s.result.reset();
  return s;
}

std::vector<TransitionRule> build_rules(const SchemaSet& schemas, const Thresholds& th) {
  const SchemaSet* sc = &schemas;
  const uint64_t many = th.many;
  std::vector<TransitionRule> rules;
  auto add = [&](std::string name, AgentAct act, std::string pre,
                 std::function<bool(const Context&)> applicable,
                 std::function<AgentState(const Context&, Rng&)> sem) {
    TransitionRule r;
    r.name = name;
    r.act = act;
    r.precondition = std::move(pre);
    r.applicable = std::move(applicable);
    r.agent_semantics = std::move(sem);
    r.agent_template_tag = std::move(name);
    r.user_followups = followup_table().at(act);
    rules.push_back(std::move(r));
  };
  auto plain = [](AgentAct act) {
    return [act](const Context&, Rng&) {
      AgentState as;
      as.act = act;
      return as;
    };
  };

  add("action_error", AgentAct::kActionError, "action executed this turn and failed",
      [](const Context& c) {
        const Statement* a = fresh_action(c);
        return a && a->result && a->result->error;
      },
      [sc](const Context& c, Rng&) {
        const Statement* a = fresh_action(c);
        AgentState as;
        as.act = AgentAct::kActionError;
        const auto& err = *a->result->error;
        const DomainSchema& d = sc->require(a->domain());
        const ActionSchema* act = d.action(a->as_action().action);
        if (!err.param.empty() && act && act->param(err.param)) {
          as.suggest_change.insert({a->domain(), err.param});
        }
        return as;
      });
  add("action_success", AgentAct::kActionSuccess, "action executed this turn and succeeded",
      [](const Context& c) {
        const Statement* a = fresh_action(c);
        return a && a->result && !a->result->error;
      },
      plain(AgentAct::kActionSuccess));
  add("confirm", AgentAct::kConfirm, "a complete action is held for confirmation",
      [sc](const Context& c) { return held_action(c, *sc, true) != nullptr; },
      [sc](const Context& c, Rng&) {
        AgentState as;
        as.act = AgentAct::kConfirm;
        as.proposed = proposal(*held_action(c, *sc, true));
        return as;
      });
  add("slot_fill", AgentAct::kSlotFill, "an accepted action lacks a required parameter",
      [sc](const Context& c) { return held_action(c, *sc, false) != nullptr; },
      [sc](const Context& c, Rng&) {
        const Statement* a = held_action(c, *sc, false);
        AgentState as;
        as.act = AgentAct::kSlotFill;
        as.requested.insert({a->domain(), a->as_action().missing_required(*sc).front()});
        return as;
      });
  add("empty_search", AgentAct::kEmptySearch, "query executed this turn returned 0 results",
      [](const Context& c) {
        const Statement* q = fresh_query(c);
        return q && count_of(q) == 0;
      },
      [](const Context& c, Rng&) {
        const Statement* q = fresh_query(c);
        AgentState as;
        as.act = AgentAct::kEmptySearch;
        auto slots = q->as_query().constrained_slots();
        std::sort(slots.begin(), slots.end());
        if (!slots.empty()) as.suggest_change.insert({q->domain(), slots.front()});
        return as;
      });
  add("propose_alternative", AgentAct::kPropose,
      "query executed this turn returned 0 results and constrains a slot",
      [](const Context& c) {
        const Statement* q = fresh_query(c);
        return q && count_of(q) == 0 && !q->as_query().constrained_slots().empty();
      },
      [](const Context& c, Rng&) {
        const Statement* q = fresh_query(c);
        auto slots = q->as_query().constrained_slots();
        std::sort(slots.begin(), slots.end());
        QueryStatement relaxed = q->as_query();
        relaxed.requested.clear();
        for (auto& atom : relaxed.filter) {
          if (atom.slot == slots.front()) {
            atom.op = FilterOp::kEq;
            atom.values = {Value::dontcare()};
          }
        }
        // A slot constrained by two comparisons collapses to one atom.
        std::vector<FilterAtom> dedup;
        for (auto& atom : relaxed.filter) {
          bool seen = false;
          for (const auto& d : dedup) seen = seen || (d.slot == atom.slot && d.op == atom.op);
          if (!seen) dedup.push_back(atom);
        }
        relaxed.filter = std::move(dedup);
        relaxed.canonicalize();
        AgentState as;
        as.act = AgentAct::kPropose;
        as.proposed = Statement::query(relaxed, StatementStatus::kProposed);
        return as;
      });
  add("answer_question", AgentAct::kRecommendOne,
      "query executed this turn has results and requested slots",
      [](const Context& c) {
        const Statement* q = fresh_query(c);
        return q && count_of(q) >= 1 && !q->as_query().requested.empty();
      },
      [sc](const Context& c, Rng&) {
        AgentState as;
        as.act = AgentAct::kRecommendOne;
        as.proposed = offer_for(c, *sc, *fresh_query(c), true);
        return as;
      });
  add("learn_more_what", AgentAct::kLearnMoreWhat,
      "query executed this turn names one entity and requests nothing",
      [sc](const Context& c) {
        const Statement* q = fresh_query(c);
        return q && count_of(q) == 1 && q->as_query().requested.empty() &&
               key_pinned(q->as_query(), *sc);
      },
      plain(AgentAct::kLearnMoreWhat));
  add("recommend_many", AgentAct::kRecommendMany,
      "query executed this turn returned 2.." + std::to_string(many) +
          " results, or more with no slot left to ask",
      [sc, many](const Context& c) {
        const Statement* q = fresh_query(c);
        const uint64_t n = count_of(q);
        return q && n >= 2 && q->as_query().requested.empty() &&
               (n <= many || !askable_slot(*sc, q->as_query()));
      },
      plain(AgentAct::kRecommendMany));
  add("recommend_one", AgentAct::kRecommendOne,
      "query executed this turn returned 1.." + std::to_string(many) +
          " results, or the user asked for a recommendation",
      [many](const Context& c) {
        const Statement* q = fresh_query(c);
        const uint64_t n = count_of(q);
        if (q && n >= 1 && n <= many && q->as_query().requested.empty()) return true;
        const DomainRecord* rec = focus_record(c);
        return c.last_act.is(UserAct::kAskRecommend) && rec && rec->query &&
               count_of(&*rec->query) >= 1;
      },
      [sc](const Context& c, Rng&) {
        AgentState as;
        as.act = AgentAct::kRecommendOne;
        as.proposed = offer_for(c, *sc, *focus_record(c)->query, false);
        return as;
      });
  add("search_question", AgentAct::kSearchQuestion,
      "query executed this turn returned more than " + std::to_string(many) +
          " results and a filterable slot is unconstrained",
      [sc, many](const Context& c) {
        const Statement* q = fresh_query(c);
        return q && count_of(q) > many && q->as_query().requested.empty() &&
               askable_slot(*sc, q->as_query());
      },
      [sc](const Context& c, Rng&) {
        const Statement* q = fresh_query(c);
        AgentState as;
        as.act = AgentAct::kSearchQuestion;
        as.requested.insert({q->domain(), *askable_slot(*sc, q->as_query())});
        return as;
      });
  add("propose_refined_query", AgentAct::kProposeRefinedQuery,
      "query executed this turn returned more than " + std::to_string(many) +
          " results and a filterable slot is unconstrained",
      [sc, many](const Context& c) {
        const Statement* q = fresh_query(c);
        return q && count_of(q) > many && q->as_query().requested.empty() &&
               askable_slot(*sc, q->as_query()) && q->result->first;
      },
      [sc](const Context& c, Rng&) {
        const Statement* q = fresh_query(c);
        const std::string slot = *askable_slot(*sc, q->as_query());
        QueryStatement refined = q->as_query();
        refined.requested.clear();
        refined.filter.push_back({slot, FilterOp::kEq, {q->result->first->at(slot)}});
        refined.canonicalize();
        AgentState as;
        as.act = AgentAct::kProposeRefinedQuery;
        as.proposed = Statement::query(refined, StatementStatus::kProposed);
        return as;
      });
  add("greet", AgentAct::kGreet, "the user greeted",
      [](const Context& c) { return c.last_act.is(UserAct::kGreet); }, plain(AgentAct::kGreet));
  add("init", AgentAct::kInit, "the dialogue has not started",
      [](const Context& c) { return c.is_null(); }, plain(AgentAct::kInit));
  add("anything_else", AgentAct::kAnythingElse,
      "nothing executed or pending this turn (cancel, acknowledgement)",
      [](const Context& c) {
        if (c.is_null() || c.last_act.by_agent) return false;
        if (c.last_act.is(UserAct::kGreet) || c.last_act.is(UserAct::kAskRecommend)) {
          return false;
        }
        return !anything_fresh(c) && c.carryover.empty();
      },
      plain(AgentAct::kAnythingElse));
  return rules;
}

// ---- user side ----

using Sem = std::function<std::optional<UserState>(const Context&, const AgentState&,
                                                   const Derivation&)>;

std::string param(const Production& p, const char* key) {
  auto it = p.params.find(key);
  return it == p.params.end() ? std::string() : it->second;
}

std::string param(const Derivation& d, const char* key) { return param(*d.top, key); }

UserState exec(std::vector<Statement> statements) {
  UserState us;
  us.act = UserAct::kExec;
  us.statements = std::move(statements);
  return us;
}

UserState bare(UserAct act) {
  UserState us;
  us.act = act;
  return us;
}

std::optional<std::vector<FilterAtom>> atoms_from(const Derivation& d, const std::string& domain) {
  std::vector<FilterAtom> atoms;
  for (const auto& b : d.bindings) {
    if (b.domain != domain) return std::nullopt;
    if (b.disjunct) {
      FilterAtom* prev = nullptr;
      for (auto& a : atoms) {
        if (a.slot == b.slot && a.op == b.op) prev = &a;
      }
      if (!prev) return std::nullopt;
      for (const auto& v : prev->values) {
        if (v.normalized() == b.value.normalized()) return std::nullopt;
      }
      prev->values.push_back(b.value);
      std::sort(prev->values.begin(), prev->values.end());
      continue;
    }
    for (const auto& a : atoms) {
      if (a.slot == b.slot) return std::nullopt;
    }
    atoms.push_back({b.slot, b.op, {b.value}});
  }
  return atoms;
}

std::optional<std::map<std::string, Value>> params_from(const Derivation& d,
                                                        const std::string& domain) {
  std::map<std::string, Value> out;
  for (const auto& b : d.bindings) {
    if (b.domain != domain || b.disjunct || b.op != FilterOp::kEq) return std::nullopt;
    if (!out.emplace(b.slot, b.value).second) return std::nullopt;
  }
  return out;
}

Statement merged_query(const Context& ctx, const SchemaSet& schemas, const std::string& domain,
                       std::vector<FilterAtom> atoms, std::set<std::string> requested = {}) {
  QueryStatement q;
  q.domain = domain;
  q.filter = std::move(atoms);
  q.requested = std::move(requested);
  if (const Statement* prev = ctx.executed_query(domain)) {
    q = merge_query(prev->as_query(), q, schemas);
  } else {
    q.canonicalize();
  }
  return Statement::query(std::move(q));
}

Statement merged_action(const Context& ctx, const std::string& domain, const std::string& action,
                        const std::map<std::string, Value>& params) {
  ActionStatement a;
  a.domain = domain;
  a.action = action;
  if (const Statement* pending = ctx.pending_action(domain)) {
    if (pending->as_action().action == action) a = pending->as_action();
  }
  for (const auto& [k, v] : params) a.params[k] = v;
  return Statement::action(std::move(a));
}

bool is_focus(const Context& ctx, const std::string& domain) {
  return ctx.focus && *ctx.focus == domain;
}

const ActionStatement* proposed_action(const Context& ctx) {
  const auto& p = ctx.agent.proposed;
  return p && p->is_action() ? &p->as_action() : nullptr;
}

std::map<std::string, UserTransition, std::less<>> build_user(const SchemaSet& schemas) {
  const SchemaSet* sc = &schemas;
  std::map<std::string, UserTransition, std::less<>> out;
  auto always = [](const Context&, const AgentState&) { return true; };
  auto any_production = [](const Context&, const Production&) { return true; };
  auto add = [&](std::string tag, UserAct act, std::string pre,
                 std::function<bool(const Context&, const AgentState&)> available,
                 std::function<bool(const Context&, const Production&)> admits, Sem sem) {
    UserTransition t;
    t.tag = tag;
    t.act = act;
    t.precondition = std::move(pre);
    t.available = std::move(available);
    t.admits = std::move(admits);
    t.semantics = std::move(sem);
    out.emplace(std::move(tag), std::move(t));
  };
  auto constant = [](UserAct act) {
    return [act](const Context&, const AgentState&, const Derivation&) -> std::optional<UserState> {
      return bare(act);
    };
  };

  // Any domain, full query merged over that domain's last query.
  Sem new_query = [sc](const Context& c, const AgentState&,
                       const Derivation& d) -> std::optional<UserState> {
    const std::string domain = param(d, "domain");
    auto atoms = atoms_from(d, domain);
    if (!atoms) return std::nullopt;
    return exec({merged_query(c, *sc, domain, std::move(*atoms))});
  };
  // Same, but must add at least one constraint.
  Sem refine = [sc](const Context& c, const AgentState&,
                    const Derivation& d) -> std::optional<UserState> {
    const std::string domain = param(d, "domain");
    auto atoms = atoms_from(d, domain);
    if (!atoms || atoms->empty()) return std::nullopt;
    return exec({merged_query(c, *sc, domain, std::move(*atoms))});
  };
  auto focus_only = [](const Context& c, const Production& p) {
    return is_focus(c, param(p, "domain"));
  };

  add("greet", UserAct::kGreet, "always", always, any_production, constant(UserAct::kGreet));
  add("end", UserAct::kEnd, "always", always, any_production, constant(UserAct::kEnd));
  add("cancel", UserAct::kCancel, "always", always, any_production, constant(UserAct::kCancel));
  add("acknowledge", UserAct::kExec, "always", always, any_production, constant(UserAct::kExec));
  add("reject_proposal", UserAct::kCancel, "the agent proposed a statement",
      [](const Context& c, const AgentState&) { return c.agent.proposed.has_value(); },
      any_production, constant(UserAct::kCancel));
  add("ask_recommend", UserAct::kAskRecommend, "the focus query has results",
      [](const Context& c, const AgentState&) {
        const DomainRecord* rec = focus_record(c);
        return rec && rec->query && count_of(&*rec->query) >= 1;
      },
      any_production, constant(UserAct::kAskRecommend));

  add("exec_new_query", UserAct::kExec, "always", always, any_production, new_query);
  add("switch_domain", UserAct::kExec, "a domain other than the focus exists",
      [sc](const Context& c, const AgentState&) {
        for (const auto& d : sc->domains()) {
          if (!is_focus(c, d.name)) return true;
        }
        return false;
      },
      [](const Context& c, const Production& p) { return !is_focus(c, param(p, "domain")); },
      new_query);
  add("ask_about_entity", UserAct::kExec, "always", always, any_production, new_query);
  add("select_entity", UserAct::kExec, "always", always, any_production, new_query);
  add("refine_query", UserAct::kExec, "a focus query exists",
      [](const Context& c, const AgentState&) {
        const DomainRecord* rec = focus_record(c);
        return rec && rec->query;
      },
      focus_only, refine);
  add("change_slot", UserAct::kExec, "the last search was empty",
      [](const Context& c, const AgentState&) {
        const DomainRecord* rec = focus_record(c);
        return rec && rec->query;
      },
      focus_only, refine);

  add("change_proposed_slot", UserAct::kExec, "the agent proposed a query",
      [](const Context& c, const AgentState&) {
        return c.agent.proposed && c.agent.proposed->is_query();
      },
      [](const Context& c, const Production& p) {
        return c.agent.proposed && c.agent.proposed->domain() == param(p, "domain");
      },
      [sc](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        const std::string domain = param(d, "domain");
        auto atoms = atoms_from(d, domain);
        if (!atoms || atoms->empty()) return std::nullopt;
        QueryStatement next;
        next.domain = domain;
        next.filter = std::move(*atoms);
        QueryStatement q = merge_query(c.agent.proposed->as_query(), next, *sc);
        return exec({merged_query(c, *sc, domain, q.filter)});
      });

  add("answer_slot", UserAct::kExec, "the agent asked for a slot",
      [](const Context&, const AgentState& as) {
        return as.act == AgentAct::kSearchQuestion && !as.requested.empty();
      },
      [](const Context& c, const Production& p) {
        return c.agent.requested.count({param(p, "domain"), param(p, "slot")}) > 0;
      },
      [sc](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        const std::string domain = param(d, "domain");
        auto atoms = atoms_from(d, domain);
        if (!atoms || atoms->size() != 1) return std::nullopt;
        return exec({merged_query(c, *sc, domain, std::move(*atoms))});
      });

  add("answer_dontcare", UserAct::kExec, "the agent asked for or questioned a slot",
      [](const Context&, const AgentState& as) {
        return (as.act == AgentAct::kSearchQuestion && !as.requested.empty()) ||
               (as.act == AgentAct::kEmptySearch && !as.suggest_change.empty());
      },
      [](const Context& c, const Production& p) {
        if (p.params.empty()) return true;
        const SlotRef ref{param(p, "domain"), param(p, "slot")};
        return c.agent.requested.count(ref) > 0 || c.agent.suggest_change.count(ref) > 0;
      },
      [sc](const Context& c, const AgentState& as,
           const Derivation& d) -> std::optional<UserState> {
        SlotRef ref;
        if (d.top->params.empty()) {
          ref = !as.requested.empty() ? *as.requested.begin() : *as.suggest_change.begin();
        } else {
          ref = {param(d, "domain"), param(d, "slot")};
        }
        std::vector<FilterAtom> atoms{{ref.slot, FilterOp::kEq, {Value::dontcare()}}};
        return exec({merged_query(c, *sc, ref.domain, std::move(atoms))});
      });

  add("accept_proposal", UserAct::kExec, "the agent proposed a statement",
      [](const Context& c, const AgentState&) { return c.agent.proposed.has_value(); },
      [](const Context& c, const Production& p) {
        if (p.params.empty()) return true;
        const ActionStatement* a = proposed_action(c);
        return a && a->domain == param(p, "domain") && a->action == param(p, "action");
      },
      [](const Context& c, const AgentState&, const Derivation&) -> std::optional<UserState> {
        Statement s = *c.agent.proposed;
        s.status = StatementStatus::kAccepted;
        s.result.reset();
        return exec({std::move(s)});
      });
  add("accept_proposal_params", UserAct::kExec, "the agent proposed an action",
      [](const Context& c, const AgentState&) { return proposed_action(c) != nullptr; },
      [](const Context& c, const Production& p) {
        const ActionStatement* a = proposed_action(c);
        return a && a->domain == param(p, "domain") && a->action == param(p, "action");
      },
      [](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        ActionStatement a = *proposed_action(c);
        auto params = params_from(d, a.domain);
        if (!params || params->empty()) return std::nullopt;
        for (const auto& [k, v] : *params) {
          if (a.params.count(k)) return std::nullopt;
          a.params[k] = v;
        }
        return exec({Statement::action(std::move(a))});
      });
  add("change_proposed_param", UserAct::kExec, "the agent proposed an action",
      [](const Context& c, const AgentState&) { return proposed_action(c) != nullptr; },
      [](const Context& c, const Production& p) {
        const ActionStatement* a = proposed_action(c);
        return a && a->domain == param(p, "domain") && a->action == param(p, "action");
      },
      [](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        ActionStatement a = *proposed_action(c);
        auto params = params_from(d, a.domain);
        if (!params || params->empty()) return std::nullopt;
        bool changed = false;
        for (const auto& [k, v] : *params) {
          auto it = a.params.find(k);
          changed = changed || it == a.params.end() || it->second.normalized() != v.normalized();
          a.params[k] = v;
        }
        if (!changed) return std::nullopt;
        return exec({Statement::action(std::move(a))});
      });

  add("ask_attribute", UserAct::kExec, "an entity is in focus",
      [sc](const Context& c, const AgentState&) {
        return c.focus && entity_in_focus(c, *sc, *c.focus).has_value();
      },
      focus_only,
      [sc](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        const std::string domain = param(d, "domain");
        const DomainSchema& ds = sc->require(domain);
        std::optional<Value> entity;
        for (const auto& b : d.bindings) {
          if (b.domain == domain && b.slot == ds.table.entity_key) entity = b.value;
        }
        if (!entity) entity = entity_in_focus(c, *sc, domain);
        if (!entity || d.bindings.size() > 1) return std::nullopt;
        std::set<std::string> requested{param(d, "slot")};
        if (!param(d, "slot2").empty()) requested.insert(param(d, "slot2"));
        std::vector<FilterAtom> atoms{{ds.table.entity_key, FilterOp::kEq, {*entity}}};
        return exec({merged_query(c, *sc, domain, std::move(atoms), std::move(requested))});
      });

  add("request_action", UserAct::kExec, "an entity is in focus",
      [sc](const Context& c, const AgentState&) {
        return c.focus && entity_in_focus(c, *sc, *c.focus).has_value();
      },
      focus_only,
      [sc](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        const std::string domain = param(d, "domain");
        const DomainSchema& ds = sc->require(domain);
        const ActionSchema* act = ds.action(param(d, "action"));
        auto entity = entity_in_focus(c, *sc, domain);
        auto params = params_from(d, domain);
        if (!act || !entity || !params) return std::nullopt;
        const std::string key = ds.entity_param(*act)->name;
        if (params->count(key)) return std::nullopt;
        (*params)[key] = *entity;
        return exec({merged_action(c, domain, act->name, *params)});
      });
  add("exec_new_action", UserAct::kExec, "always", always, any_production,
      [](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        const std::string domain = param(d, "domain");
        auto params = params_from(d, domain);
        if (!params) return std::nullopt;
        return exec({merged_action(c, domain, param(d, "action"), *params)});
      });
  add("fill_slot", UserAct::kExec, "the agent asked for an action parameter",
      [](const Context&, const AgentState& as) {
        return as.act == AgentAct::kSlotFill && !as.requested.empty();
      },
      [](const Context& c, const Production& p) {
        const Statement* pending = c.pending_action(param(p, "domain"));
        if (!pending || pending->as_action().action != param(p, "action")) return false;
        const std::string slot = param(p, "slot");
        return slot.empty() || c.agent.requested.count({param(p, "domain"), slot}) > 0;
      },
      [](const Context& c, const AgentState& as, const Derivation& d) -> std::optional<UserState> {
        const std::string domain = param(d, "domain");
        auto params = params_from(d, domain);
        if (!params) return std::nullopt;
        bool answers = false;
        for (const auto& ref : as.requested) answers = answers || params->count(ref.slot) > 0;
        if (!answers) return std::nullopt;
        return exec({merged_action(c, domain, param(d, "action"), *params)});
      });

  add("insist", UserAct::kInsist, "the last search was empty or the action failed",
      [](const Context& c, const AgentState& as) {
        const DomainRecord* rec = focus_record(c);
        if (!rec) return false;
        if (as.act == AgentAct::kActionError) return rec->action.has_value();
        return as.act == AgentAct::kEmptySearch && rec->query.has_value();
      },
      any_production,
      [](const Context& c, const AgentState& as, const Derivation&) -> std::optional<UserState> {
        const DomainRecord* rec = focus_record(c);
        Statement s = as.act == AgentAct::kActionError ? *rec->action : *rec->query;
        s.status = StatementStatus::kAccepted;
        s.result.reset();
        UserState us;
        us.act = UserAct::kInsist;
        us.statements.push_back(std::move(s));
        return us;
      });
  add("change_param", UserAct::kExec, "the action failed",
      [](const Context& c, const AgentState& as) {
        const DomainRecord* rec = focus_record(c);
        return as.act == AgentAct::kActionError && rec && rec->action;
      },
      [](const Context& c, const Production& p) {
        const DomainRecord* rec = focus_record(c);
        return rec && rec->action && rec->action->domain() == param(p, "domain") &&
               rec->action->as_action().action == param(p, "action");
      },
      [](const Context& c, const AgentState&, const Derivation& d) -> std::optional<UserState> {
        ActionStatement a = focus_record(c)->action->as_action();
        auto params = params_from(d, a.domain);
        if (!params || params->empty()) return std::nullopt;
        bool changed = false;
        for (const auto& [k, v] : *params) {
          auto it = a.params.find(k);
          changed = changed || it == a.params.end() || it->second.normalized() != v.normalized();
          a.params[k] = v;
        }
        if (!changed) return std::nullopt;
        return exec({Statement::action(std::move(a))});
      });
  return out;
}

}  // namespace

MachineSpec builtin_transaction_machine(const SchemaSet& schemas, const Thresholds& thresholds) {
  if (schemas.empty()) throw Error(ErrorKind::kValidation, "machine: no domains");
  for (const auto& d : schemas.domains()) {
    bool filterable = false;
    for (const auto& c : d.table.columns) {
      filterable = filterable || (c.filterable && c.name != d.table.entity_key);
    }
    if (!filterable) {
      throw Error(ErrorKind::kValidation,
                  "machine: domain '" + d.name + "' has no filterable slot to ask about");
    }
  }
  MachineSpec m;
  m.schemas_ = &schemas;
  m.thresholds_ = thresholds;
  m.rules_ = build_rules(schemas, thresholds);
  m.user_ = build_user(schemas);
  for (const auto& r : m.rules_) {
    for (const auto& tag : r.user_followups) {
      if (!m.user_.count(tag)) throw Error(ErrorKind::kInternal, "machine: unknown followup " + tag);
    }
  }
  return m;
}

Policy default_policy(const MachineSpec& m) {
  Policy p;
  for (const auto& r : m.rules()) p.order.push_back(r.name);
  return p;
}

std::vector<const TransitionRule*> applicable_rules(const MachineSpec& m, const Context& ctx) {
  std::vector<const TransitionRule*> out;
  for (const auto& r : m.rules()) {
    if (r.applicable(ctx)) out.push_back(&r);
  }
  return out;
}

AgentChoice select_agent(const MachineSpec& m, const Policy& policy, const Context& ctx,
                         Rng& rng) {
  for (const auto& name : policy.order) {
    const TransitionRule* r = m.rule(name);
    if (r && r->applicable(ctx)) return {r, r->agent_semantics(ctx, rng)};
  }
  const TransitionRule* fallback = m.rule("anything_else");
  AgentState as;
  as.act = AgentAct::kAnythingElse;
  return {fallback, as};
}

AgentState agent_state_of(const Context& ctx) {
  AgentState as;
  as.act = ctx.last_act.by_agent ? static_cast<AgentAct>(ctx.last_act.code) : AgentAct::kInvalid;
  as.requested = ctx.agent.requested;
  as.suggest_change = ctx.agent.suggest_change;
  as.proposed = ctx.agent.proposed;
  return as;
}

std::vector<const UserTransition*> enumerate_user_transitions(const MachineSpec& m,
                                                              const Context& ctx,
                                                              const AgentState& as) {
  std::vector<const UserTransition*> out;
  auto it = followup_table().find(as.act);
  if (it == followup_table().end()) return out;
  for (const auto& tag : it->second) {
    const UserTransition* t = m.user_transition(tag);
    if (t && t->available(ctx, as)) out.push_back(t);
  }
  return out;
}

std::optional<UserState> interpret(const MachineSpec& m, const Context& ctx, const Derivation& d) {
  if (!d.top) return std::nullopt;
  const AgentState as = agent_state_of(ctx);
  for (const UserTransition* t : enumerate_user_transitions(m, ctx, as)) {
    if (t->tag != d.tag) continue;
    if (!t->admits(ctx, *d.top)) return std::nullopt;
    auto us = t->semantics(ctx, as, d);
    if (!us) return std::nullopt;
    canonicalize(*us);
    if (!check_user_state(*us, m.schemas()).empty()) return std::nullopt;
    return us;
  }
  return std::nullopt;
}

std::optional<UserTurn> sample_user_turn(const MachineSpec& m, const Grammar& g,
                                         const Database& db, const Lexicon& lex,
                                         const Context& ctx, const UserTransition& t,
                                         Rng& rng) {
  const auto* all = g.productions(kUserTurn);
  if (!all) return std::nullopt;
  std::vector<const Production*> fits;
  for (const auto& p : *all) {
    if (p.tag == t.tag && t.admits(ctx, p)) fits.push_back(&p);
  }
  if (fits.empty()) return std::nullopt;
  const ValueSampler fallback = database_sampler(db);
  constexpr int kAttempts = 24;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const Production* chosen = rng.pick(fits);
    std::map<std::string, Row> rows;
    ExpandRequest req;
    req.start = std::string(kUserTurn);
    req.filter = [chosen](const Production& p) { return &p == chosen; };
    req.lexicon = &lex;
    req.sampler = [&](const ValueSlotSpec& s, Rng& r) -> Value {
      const DomainSchema& d = m.schemas().require(s.domain);
      const ColumnSpec* col = d.table.column(s.lex_column);
      if (!col || s.disjunct || db.rows(s.domain).empty()) return fallback(s, r);
      const DomainRecord* rec = nullptr;
      auto it = ctx.domains.find(s.domain);
      if (it != ctx.domains.end()) rec = &it->second;
      if (rec && rec->query && rec->query->result && rec->query->result->first && r.chance(0.3)) {
        return rec->query->result->first->at(col->name);
      }
      auto row = rows.find(s.domain);
      if (row == rows.end()) row = rows.emplace(s.domain, sample_row(db, s.domain, r)).first;
      return row->second.at(col->name);
    };
    Expansion e = expand(g, req, rng);
    auto us = interpret(m, ctx, e.derivation);
    if (!us) continue;
    return UserTurn{std::move(e.utterance), std::move(e.derivation), std::move(*us)};
  }
  return std::nullopt;
}

std::string describe(const MachineSpec& m) {
  std::ostringstream out;
  out << "agent rules: " << m.num_agent_rules() << "\n";
  out << "user transitions: " << m.num_user_transitions() << "\n";
  out << "edges: " << m.num_edges() << "\n";
  for (const auto& r : m.rules()) {
    out << "rule " << r.name << " act=" << agent_act_name(r.act) << " when " << r.precondition
        << "\n  followups: " << join(r.user_followups, ", ") << "\n";
  }
  for (const auto& [tag, t] : m.user_transitions()) {
    out << "user " << tag << " act=" << user_act_name(t.act) << " when " << t.precondition
        << "\n";
  }
  return out.str();
}

}  // namespace forge
