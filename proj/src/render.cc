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

#include <algorithm>

#include "forge/engine.h"
#include "forge/state_machine.h"
#include "state_helpers.h"

namespace forge {
namespace detail {

const DomainRecord* focus_record(const Context& ctx) {
  if (!ctx.focus) return nullptr;
  auto it = ctx.domains.find(*ctx.focus);
  return it == ctx.domains.end() ? nullptr : &it->second;
}

std::optional<std::string> askable_slot(const SchemaSet& schemas, const QueryStatement& q) {
  const DomainSchema* d = schemas.domain(q.domain);
  if (!d) return std::nullopt;
  for (const auto& c : d->table.columns) {
    if (!c.filterable || c.name == d->table.entity_key || c.kind != ValueKind::kStringEnum) {
      continue;
    }
    if (!q.atom(c.name)) return c.name;
  }
  return std::nullopt;
}

bool key_pinned(const QueryStatement& q, const SchemaSet& schemas) {
  const DomainSchema* d = schemas.domain(q.domain);
  if (!d) return false;
  for (const auto& a : q.filter) {
    if (a.slot == d->table.entity_key && a.op == FilterOp::kEq && !a.is_dontcare()) return true;
  }
  return false;
}

namespace {

std::optional<Value> action_entity(const ActionStatement& a, const SchemaSet& schemas) {
  const DomainSchema* d = schemas.domain(a.domain);
  const ActionSchema* act = d ? d->action(a.action) : nullptr;
  if (!act) return std::nullopt;
  auto it = a.params.find(d->entity_param(*act)->name);
  if (it == a.params.end()) return std::nullopt;
  return it->second;
}

std::optional<Value> query_entity(const QueryStatement& q, const SchemaSet& schemas) {
  const DomainSchema* d = schemas.domain(q.domain);
  if (!d) return std::nullopt;
  const FilterAtom* a = q.atom(d->table.entity_key);
  if (a && a->op == FilterOp::kEq && a->values.size() == 1 && !a->is_dontcare()) {
    return a->values[0];
  }
  return std::nullopt;
}

}  // namespace

std::optional<Value> entity_in_focus(const Context& ctx, const SchemaSet& schemas,
                                     const std::string& domain) {
  const auto& p = ctx.agent.proposed;
  if (p && p->domain() == domain) {
    auto v = p->is_action() ? action_entity(p->as_action(), schemas)
                            : query_entity(p->as_query(), schemas);
    if (v) return v;
  }
  const Statement* act = ctx.executed_action(domain);
  const Statement* q = ctx.executed_query(domain);
  const bool after_action =
      ctx.last_act.is(AgentAct::kActionSuccess) || ctx.last_act.is(AgentAct::kActionError);
  if (act && (after_action || !q)) return action_entity(act->as_action(), schemas);
  if (q && q->result && q->result->count >= 1 && q->result->first) {
    const DomainSchema& d = schemas.require(domain);
    auto it = q->result->first->find(d.table.entity_key);
    if (it != q->result->first->end()) return it->second;
  }
  if (act) return action_entity(act->as_action(), schemas);
  return std::nullopt;
}

std::optional<Statement> offer_for(const Context& ctx, const SchemaSet& schemas,
                                   const Statement& query, bool skip_done) {
  if (!query.result || !query.result->first) return std::nullopt;
  const DomainSchema& d = schemas.require(query.domain());
  if (d.actions.empty()) return std::nullopt;
  const Value key = query.result->first->at(d.table.entity_key);
  if (skip_done) {
    const Statement* done = ctx.executed_action(d.name);
    if (done && done->result && !done->result->error) {
      auto v = action_entity(done->as_action(), schemas);
      if (v && v->normalized() == key.normalized()) return std::nullopt;
    }
  }
  const ActionSchema& act = d.actions.front();
  ActionStatement a;
  a.domain = d.name;
  a.action = act.name;
  a.params[d.entity_param(act)->name] = key;
  return Statement::action(std::move(a), StatementStatus::kProposed);
}

}  // namespace detail

namespace {

std::string spaced(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

std::string values_text(const std::vector<Value>& values) {
  std::vector<std::string> parts;
  for (const auto& v : values) parts.push_back(v.display());
  return join(parts, " or ");
}

std::string op_words(FilterOp op) {
  switch (op) {
    case FilterOp::kNeq: return "not ";
    case FilterOp::kLt: return "less than ";
    case FilterOp::kGt: return "more than ";
    case FilterOp::kLeq: return "at most ";
    case FilterOp::kGeq: return "at least ";
    default: return "";
  }
}

std::string fill(const std::string& phrase, const std::string& value) {
  std::string out = phrase;
  auto pos = out.find('#');
  if (pos == std::string::npos) return out + " " + value;
  return out.replace(pos, 1, value);
}

std::string describe_slot(const std::vector<std::string>& preps,
                          const std::vector<std::string>& verbs, const std::string& noun,
                          const std::string& value) {
  if (!preps.empty()) return fill(preps.front(), value);
  if (!verbs.empty()) return "that " + fill(verbs.front(), value);
  return "with " + noun + " " + value;
}

std::string describe_atom(const DomainSchema& d, const FilterAtom& a) {
  const ColumnSpec* c = d.table.column(a.slot);
  const std::string value = op_words(a.op) + values_text(a.values);
  if (!c) return a.slot + " " + value;
  return describe_slot(c->phrases_with(PhraseRole::kPrep), c->phrases_with(PhraseRole::kVerb),
                       c->noun(), value);
}

std::string domain_noun(const DomainSchema& d) {
  return d.phrases.empty() ? spaced(d.name) : d.phrases.front();
}

std::string domain_plural(const DomainSchema& d) {
  for (const auto& p : d.phrases) {
    if (split_ws(p).size() == 1) return p + "s";
  }
  return "options";
}

std::string describe_query(const DomainSchema& d, const QueryStatement& q) {
  std::vector<std::string> parts;
  for (const auto& a : q.filter) {
    if (!a.is_dontcare()) parts.push_back(describe_atom(d, a));
  }
  std::string out = domain_noun(d);
  if (!parts.empty()) out += " " + join(parts, " and ");
  return out;
}

std::string action_phrase(const ActionSchema& a) {
  auto alone = a.standalone_phrases();
  return alone.empty() ? spaced(a.name) : alone.front();
}

std::string describe_action(const DomainSchema& d, const ActionStatement& a) {
  const ActionSchema* act = d.action(a.action);
  if (!act) return spaced(a.action);
  std::string out = action_phrase(*act);
  for (const auto& p : act->params) {
    auto it = a.params.find(p.name);
    if (it == a.params.end()) continue;
    out += " " + describe_slot(p.phrases_with(PhraseRole::kPrep),
                               p.phrases_with(PhraseRole::kVerb), p.noun(),
                               it->second.display());
  }
  return out;
}

std::string slot_noun(const DomainSchema& d, const std::string& slot) {
  // The entity parameter is asked for by the domain noun ("which hotel").
  for (const auto& a : d.actions) {
    const ParamSpec* p = a.param(slot);
    if (p && p->links_table_column == d.table.entity_key) return domain_noun(d);
  }
  if (const ColumnSpec* c = d.table.column(slot)) return c->noun();
  for (const auto& a : d.actions) {
    if (const ParamSpec* p = a.param(slot)) return p->noun();
  }
  return spaced(slot);
}

}  // namespace

std::string render_agent(const MachineSpec& m, const Grammar& g, const Database& db,
                         const Context& ctx, const AgentChoice& choice, Rng& rng) {
  const SchemaSet& schemas = m.schemas();
  const AgentState& as = choice.state;
  std::optional<std::string> domain = ctx.focus;
  if (as.proposed) domain = as.proposed->domain();
  if (!as.requested.empty()) domain = as.requested.begin()->domain;
  if (!as.suggest_change.empty()) domain = as.suggest_change.begin()->domain;

  ExpandRequest req;
  req.start = std::string(kAgentTurn);
  const std::string tag = choice.rule ? choice.rule->agent_template_tag : "anything_else";
  req.filter = [&](const Production& p) {
    if (p.tag != tag) return false;
    auto it = p.params.find("domain");
    return it == p.params.end() || (domain && it->second == *domain);
  };
  req.sampler = database_sampler(db);

  if (domain) {
    const DomainSchema& d = schemas.require(*domain);
    const Statement* q = ctx.executed_query(*domain);
    const Statement* done = ctx.executed_action(*domain);
    req.text["domain"] = domain_noun(d);
    req.text["domains"] = domain_plural(d);
    req.text["count"] = q && q->result ? std::to_string(q->result->count) : "0";
    std::string slot;
    if (!as.requested.empty()) slot = as.requested.begin()->slot;
    if (!as.suggest_change.empty()) slot = as.suggest_change.begin()->slot;
    req.text["slot"] = slot.empty() ? "option" : slot_noun(d, slot);

    // The row the agent talks about.
    const Row* row = nullptr;
    if (auto key = detail::entity_in_focus(attach_agent_state(ctx, as), schemas, *domain)) {
      row = db.find(*domain, *key);
    }
    if (!row && q && q->result && q->result->first) row = &*q->result->first;
    if (row) {
      for (const auto& [col, v] : *row) req.fixed[*domain + "." + col] = v;
    }

    std::vector<std::string> names;
    if (q) {
      for (const auto& r : db.rows(*domain)) {
        bool ok = true;
        for (const auto& atom : q->as_query().filter) ok = ok && atom_matches(atom, r);
        if (ok) names.push_back(r.at(d.table.entity_key).display());
        if (names.size() == 3) break;
      }
    }
    if (names.size() > 1) {
      const std::string last = names.back();
      names.pop_back();
      req.text["names"] = join(names, " , ") + " and " + last;
    } else {
      req.text["names"] = names.empty() ? "none" : names.front();
    }

    req.text["what"] = q ? describe_query(d, q->as_query()) : domain_noun(d);
    req.text["constraint"] = "";
    if (as.proposed && as.proposed->is_query()) {
      for (const auto& atom : as.proposed->as_query().filter) {
        if (!q || !q->as_query().atom(atom.slot) || *q->as_query().atom(atom.slot) != atom) {
          if (!atom.is_dontcare()) req.text["constraint"] = describe_atom(d, atom);
        }
      }
    }
    req.text["offer"] = "";
    if (as.proposed && as.proposed->is_action()) {
      const ActionSchema* act = d.action(as.proposed->as_action().action);
      if (act) req.text["offer"] = "Would you like to " + action_phrase(*act) + " ?";
    }

    std::vector<std::string> info;
    if (q && row) {
      for (const auto& s : q->as_query().requested) {
        auto it = row->find(s);
        if (it == row->end()) continue;
        info.push_back("the " + slot_noun(d, s) + " of " +
                       row->at(d.table.entity_key).display() + " is " + it->second.display());
      }
    }
    req.text["info"] = info.empty() ? "here is what I found" : join(info, " and ");

    const Statement* subject = nullptr;
    if (as.proposed && as.proposed->is_action()) subject = &*as.proposed;
    if (!subject && done) subject = done;
    req.text["action"] = subject ? describe_action(d, subject->as_action()) : "do that";
    req.text["problem"] = "that is not possible";
    if (done && done->result && done->result->error) {
      const auto& err = *done->result->error;
      const std::string noun = err.param.empty() ? "request" : slot_noun(d, err.param);
      if (err.code == "missing_entity") {
        req.text["problem"] = "I could not find that " + domain_noun(d);
      } else if (err.code == "unavailable_slot_value") {
        req.text["problem"] = "the " + noun + " is not available";
      } else {
        req.text["problem"] = "the " + noun + " is not valid";
      }
    }
  }
  for (const char* key : {"domain", "domains", "count", "slot", "names", "what", "constraint",
                          "offer", "info", "action", "problem"}) {
    req.text.emplace(key, "");
  }
  try {
    return expand(g, req, rng).utterance;
  } catch (const Error& e) {
    throw Error(ErrorKind::kInternal, "agent template for rule '" + tag + "': " + e.what());
  }
}

}  // namespace forge
