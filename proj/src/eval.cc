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

#include "forge/eval.h"

#include <algorithm>

#include "forge/engine.h"
#include "forge/linearize.h"
#include "forge/templates.h"
#include "json.hpp"

namespace forge {

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kUnrepresentable: return "unrepresentable";
    case Category::kTrained: return "trained";
    case Category::kSynthesizable: return "synthesizable";
    case Category::kUnsynthesizable: return "unsynthesizable";
  }
  return "?";
}

namespace {

Value abstract_value(const Value& v) {
  if (v.is_str()) return Value::str("string");
  if (v.is_int()) return Value::integer(0);
  if (v.is_time()) return Value::time({0});
  if (v.is_day()) return Value::day(Day::kMon);
  return v;
}

uint64_t bucket(uint64_t count) {
  const uint64_t many = Thresholds{}.many;
  if (count <= 1) return count;
  return count <= many ? 2 : many + 1;
}

void abstract_statement(Statement& s) {
  if (s.is_query()) {
    for (auto& atom : s.as_query().filter) {
      for (auto& v : atom.values) v = abstract_value(v);
    }
  } else {
    for (auto& [name, v] : s.as_action().params) v = abstract_value(v);
  }
  if (s.result) {
    s.result->count = bucket(s.result->count);
    s.result->first.reset();
  }
}

UserState abstract_user(UserState us) {
  for (auto& s : us.statements) abstract_statement(s);
  canonicalize(us);
  return us;
}

Context abstract_context(Context ctx) {
  for (auto& [name, rec] : ctx.domains) {
    if (rec.query) abstract_statement(*rec.query);
    if (rec.action) abstract_statement(*rec.action);
  }
  for (auto& s : ctx.carryover) abstract_statement(s);
  if (ctx.agent.proposed) abstract_statement(*ctx.agent.proposed);
  return ctx;
}

constexpr size_t kEnumerationLimit = 1500;

using GoldValues = std::map<std::pair<std::string, std::string>, std::vector<Value>>;

GoldValues gold_values(const UserState& gold) {
  GoldValues out;
  for (const auto& s : gold.statements) {
    if (s.is_query()) {
      for (const auto& atom : s.as_query().filter) {
        for (const auto& v : atom.values) {
          if (!v.is_dontcare()) out[{s.domain(), atom.slot}].push_back(v);
        }
      }
    } else {
      for (const auto& [name, v] : s.as_action().params) out[{s.domain(), name}].push_back(v);
    }
  }
  return out;
}

// Up to two distinct values per slot: the gold ones first, then stand-ins.
ValueChoices representative_choices(const Database& db, const GoldValues& gold) {
  return [&db, gold](const ValueSlotSpec& s) {
    std::vector<Value> out;
    auto push = [&](const Value& v) {
      if (out.size() >= 2 || !v.fits(s.kind)) return;
      for (const auto& o : out) {
        if (o.normalized() == v.normalized()) return;
      }
      out.push_back(v);
    };
    if (auto it = gold.find({s.domain, s.slot}); it != gold.end()) {
      for (const auto& v : it->second) push(v);
    }
    const std::string column = s.lex_column.empty() ? s.slot : s.lex_column;
    if (const DomainSchema* ds = db.schemas().domain(s.domain); ds && ds->table.column(column)) {
      for (const auto& v : db.distinct(s.domain, column)) push(v);
    }
    switch (s.kind) {
      case ValueKind::kInteger:
        push(Value::integer(2));
        push(Value::integer(3));
        break;
      case ValueKind::kTimeOfDay:
        push(Value::time({19 * 60}));
        push(Value::time({20 * 60}));
        break;
      case ValueKind::kDayOfWeek:
        push(Value::day(Day::kFri));
        push(Value::day(Day::kSat));
        break;
      default:
        push(Value::str("alpha"));
        push(Value::str("beta"));
    }
    return out;
  };
}

// Whether a followup of the agent state stored in `ctx` yields `want`.
bool followups_produce(const Categorizer& c, const Context& ctx, const ValueChoices& choices,
                       const std::string& want) {
  const AgentState as = agent_state_of(ctx);
  for (const UserTransition* t : enumerate_user_transitions(c.machine, ctx, as)) {
    auto filter = [&](const Production& p) { return p.tag == t->tag && t->admits(ctx, p); };
    for (const auto& x : enumerate_expansions(c.grammar, kUserTurn, filter, choices,
                                              kEnumerationLimit)) {
      auto us = interpret(c.machine, ctx, x.derivation);
      if (us && linearize(abstract_user(*us)) == want) return true;
    }
  }
  return false;
}

}  // namespace

std::string abstract_shape(const Context& user_ctx, const UserState& us) {
  return linearize(abstract_context(user_ctx)) + " || " + linearize(abstract_user(us));
}

Category categorize(const Categorizer& c, const Context& user_ctx, const UserState& gold) {
  if (gold.act == UserAct::kInvalid) return Category::kUnrepresentable;
  if (c.signature.count(abstract_shape(user_ctx, gold))) return Category::kTrained;

  const std::string want = linearize(abstract_user(gold));
  const ValueChoices choices = representative_choices(c.db, gold_values(gold));
  if (c.max_depth >= 1 && followups_produce(c, user_ctx, choices, want)) {
    return Category::kSynthesizable;
  }
  if (c.max_depth >= 2) {
    // Any agent turn the machine could have taken here, after any user act.
    Context base = agent_facing(user_ctx);
    std::vector<LastAct> lasts;
    if (!user_ctx.last_act.by_agent) lasts.push_back(user_ctx.last_act);
    for (UserAct a : {UserAct::kExec, UserAct::kGreet, UserAct::kAskRecommend, UserAct::kCancel,
                      UserAct::kInsist}) {
      if (std::find(lasts.begin(), lasts.end(), LastAct::user(a)) == lasts.end()) {
        lasts.push_back(LastAct::user(a));
      }
    }
    std::set<std::string> tried;
    for (const LastAct& last : lasts) {
      base.last_act = last;
      for (const TransitionRule* r : applicable_rules(c.machine, base)) {
        Rng rng(0);
        const Context next = attach_agent_state(base, r->agent_semantics(base, rng));
        if (!tried.insert(linearize(next)).second) continue;
        if (followups_produce(c, next, choices, want)) return Category::kSynthesizable;
      }
    }
  }
  return Category::kUnsynthesizable;
}

namespace {

struct Outcome {
  bool em = false;
  bool slot = false;
};

void count(Tally& t, const Outcome& o) {
  ++t.turns;
  t.em += o.em;
  t.slot += o.slot;
}

double ratio(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string domain_key(const UserState& gold) {
  std::set<std::string> names;
  for (const auto& s : gold.statements) names.insert(s.domain());
  if (names.empty()) return "none";
  return join(std::vector<std::string>(names.begin(), names.end()), "+");
}

}  // namespace

MetricsReport evaluate(const std::vector<EvalRecord>& records, const SchemaSet& schemas,
                       const Categorizer* categorizer) {
  std::map<std::string, std::vector<const EvalRecord*>> by_dialogue;
  for (const auto& r : records) by_dialogue[r.dialogue_id].push_back(&r);

  MetricsReport rep;
  uint64_t prefix_em = 0, prefix_slot = 0, whole_em = 0, whole_slot = 0;
  std::map<std::string, Category> seen;  // by abstract shape
  for (auto& [id, turns] : by_dialogue) {
    std::sort(turns.begin(), turns.end(),
              [](const EvalRecord* a, const EvalRecord* b) { return a->turn < b->turn; });
    for (size_t i = 0; i < turns.size(); ++i) {
      if (turns[i]->turn != i) {
        throw Error(ErrorKind::kValidation,
                    "dialogue " + id + ": expected turn " + std::to_string(i) + ", found " +
                        std::to_string(turns[i]->turn));
      }
    }
    bool all_em = true, all_slot = true;
    for (const EvalRecord* r : turns) {
      UserState gold;
      try {
        gold = delinearize_user(r->gold, schemas);
      } catch (const Error& e) {
        throw Error(ErrorKind::kParse, "dialogue " + id + " turn " + std::to_string(r->turn) +
                                           ": bad gold target: " + e.what());
      }
      UserState pred;
      try {
        pred = delinearize_user(r->pred, schemas);
      } catch (const Error&) {
        pred = UserState{};  // unparseable prediction counts as Invalid
      }
      Outcome o;
      o.em = states_equal(pred, gold);
      o.slot = o.em || slots_of(pred) == slots_of(gold);
      all_em = all_em && o.em;
      all_slot = all_slot && o.slot;
      ++rep.turns;
      rep.turn_em += o.em;
      rep.turn_slot += o.slot;
      prefix_em += all_em;
      prefix_slot += all_slot;
      rep.disjunction_turns += has_disjunction(gold);
      count(rep.per_domain[domain_key(gold)], o);
      if (categorizer) {
        Context ctx;
        try {
          ctx = delinearize_context(r->context, schemas);
        } catch (const Error& e) {
          throw Error(ErrorKind::kParse, "dialogue " + id + " turn " + std::to_string(r->turn) +
                                             ": bad context: " + e.what());
        }
        const std::string shape = abstract_shape(ctx, gold);
        auto it = seen.find(shape);
        if (it == seen.end()) it = seen.emplace(shape, categorize(*categorizer, ctx, gold)).first;
        count(rep.per_category[std::string(category_name(it->second))], o);
      }
    }
    ++rep.dialogues;
    whole_em += all_em;
    whole_slot += all_slot;
  }
  rep.turn_em = ratio(static_cast<uint64_t>(rep.turn_em), rep.turns);
  rep.turn_slot = ratio(static_cast<uint64_t>(rep.turn_slot), rep.turns);
  rep.dialogue_em = ratio(prefix_em, rep.turns);
  rep.dialogue_slot = ratio(prefix_slot, rep.turns);
  rep.whole_dialogue_em = ratio(whole_em, rep.dialogues);
  rep.whole_dialogue_slot = ratio(whole_slot, rep.dialogues);
  rep.categorize_depth = categorizer ? categorizer->max_depth : 0;
  return rep;
}

std::string report_json(const MetricsReport& r) {
  using nlohmann::json;
  auto tally = [&](const Tally& t) {
    return json{{"turns", t.turns},
                {"share", ratio(t.turns, r.turns)},
                {"em", ratio(t.em, t.turns)},
                {"slot", ratio(t.slot, t.turns)}};
  };
  json domains = json::object();
  for (const auto& [k, t] : r.per_domain) domains[k] = tally(t);
  json j = {{"turns", r.turns},
            {"dialogues", r.dialogues},
            {"turn_em", r.turn_em},
            {"turn_slot", r.turn_slot},
            {"dialogue_em", r.dialogue_em},
            {"dialogue_slot", r.dialogue_slot},
            {"whole_dialogue_em", r.whole_dialogue_em},
            {"whole_dialogue_slot", r.whole_dialogue_slot},
            {"disjunction_turns", r.disjunction_turns},
            {"per_domain", domains}};
  if (r.categorize_depth > 0) {
    json cats = json::object();
    for (Category c : {Category::kUnrepresentable, Category::kTrained, Category::kSynthesizable,
                       Category::kUnsynthesizable}) {
      const std::string name(category_name(c));
      auto it = r.per_category.find(name);
      cats[name] = tally(it == r.per_category.end() ? Tally{} : it->second);
    }
    j["category_table"] = cats;
    j["categorize_depth"] = r.categorize_depth;
  }
  return j.dump(2);
}

Signature load_signature(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::kValidation, path + ": expected an array of shapes");
  Signature s;
  for (const auto& x : j) {
    if (!x.is_string()) throw Error(ErrorKind::kValidation, path + ": non-string shape");
    s.insert(x.get<std::string>());
  }
  return s;
}

void save_signature(const Signature& s, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : s) j.push_back(x);
  write_file(path, j.dump() + "\n");
}

}  // namespace forge
