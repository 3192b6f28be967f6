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

#include <initializer_list>

#include "forge/state_machine.h"

namespace forge {
namespace {

using Params = std::map<std::string, std::string>;

// Nonterminal names. Instantiated ones carry their domain/action/slot.
std::string nt(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) {
    if (!out.empty()) out += ':';
    out += p;
  }
  return out;
}

bool is_text(ValueKind k) { return k == ValueKind::kStringEnum || k == ValueKind::kFreeString; }

ValueSlotSpec column_slot(const DomainSchema& d, const ColumnSpec& c) {
  ValueSlotSpec s;
  s.domain = d.name;
  s.slot = c.name;
  s.lex_column = c.name;
  s.kind = c.kind;
  return s;
}

ValueSlotSpec param_slot(const DomainSchema& d, const ParamSpec& p) {
  ValueSlotSpec s;
  s.domain = d.name;
  s.slot = p.name;
  s.lex_column = p.links_table_column.value_or(p.name);
  s.kind = p.kind;
  return s;
}

struct Builder {
  Grammar g;

  void add(const std::string& lhs, std::vector<Part> parts, std::string tag = {},
           Params params = {}) {
    Production p;
    p.parts = std::move(parts);
    p.tag = std::move(tag);
    p.params = std::move(params);
    g.add(lhs, std::move(p));
  }

  void user(const std::string& tag, std::vector<Part> parts, Params params = {}) {
    add(std::string(kUserTurn), std::move(parts), tag, std::move(params));
  }

  void agent(const std::string& tag, std::vector<Part> parts) {
    add(std::string(kAgentTurn), std::move(parts), tag);
  }
};

Part lit(std::string s) { return Part::literal(std::move(s)); }
Part ref(std::string s) { return Part::nt(std::move(s)); }
Part ph(std::string s) { return Part::placeholder(std::move(s)); }

// "in the # of town" with the value part(s) spliced in at '#'.
std::vector<Part> splice(std::string_view phrase, const std::vector<Part>& value) {
  std::vector<Part> out;
  const auto hash = phrase.find('#');
  const std::string before = trim(phrase.substr(0, hash));
  const std::string after = hash == std::string_view::npos ? "" : trim(phrase.substr(hash + 1));
  if (!before.empty()) out.push_back(lit(before));
  out.insert(out.end(), value.begin(), value.end());
  if (!after.empty()) out.push_back(lit(after));
  return out;
}

// Value renderings of a filter slot: plain, disjunction for text, and
// comparisons for integers.
std::vector<std::vector<Part>> value_forms(const ValueSlotSpec& base, bool with_variants) {
  std::vector<std::vector<Part>> out;
  out.push_back({Part::value(base)});
  if (!with_variants) return out;
  if (is_text(base.kind)) {
    ValueSlotSpec second = base;
    second.disjunct = true;
    second.role = base.domain + "." + base.slot + "|or";
    out.push_back({Part::value(base), lit("or"), Part::value(second)});
  } else if (base.kind == ValueKind::kInteger) {
    const std::pair<const char*, FilterOp> cmp[] = {{"at least", FilterOp::kGeq},
                                                    {"at most", FilterOp::kLeq},
                                                    {"more than", FilterOp::kGt},
                                                    {"less than", FilterOp::kLt}};
    for (const auto& [words, op] : cmp) {
      ValueSlotSpec s = base;
      s.op = op;
      out.push_back({lit(words), Part::value(s)});
    }
  }
  return out;
}

void domain_phrases(Builder& b, const DomainSchema& d) {
  const std::string noun = nt({"DOMNOUN", d.name});
  if (d.phrases.empty()) {
    std::string name = d.name;
    for (auto& c : name) {
      if (c == '_') c = ' ';
    }
    b.add(noun, {lit(name)});
  }
  for (const auto& p : d.phrases) b.add(noun, {lit(p)});

  const std::string adj = nt({"ADJ", d.name});
  const std::string mod = nt({"MOD", d.name});
  const std::string valnoun = nt({"VALNOUN", d.name});
  bool has_adj = false;
  for (const auto& c : d.table.columns) {
    if (!c.filterable) continue;
    const ValueSlotSpec s = column_slot(d, c);
    const bool key = c.name == d.table.entity_key;
    const auto adjectives = c.phrases_with(PhraseRole::kAdjective);
    if (!adjectives.empty() && is_text(c.kind) && !key) {
      for (const auto& v : value_forms(s, true)) b.add(adj, splice(adjectives[0], v));
      has_adj = true;
      // One-word nouns also form "<value> <noun>" ("indian food").
      for (const auto& n : c.phrases_with(PhraseRole::kNoun)) {
        if (split_ws(n).size() == 1) b.add(valnoun, {Part::value(s), lit(n)});
      }
    }
    for (const auto& phrase : c.phrases_with(PhraseRole::kPrep)) {
      for (const auto& v : value_forms(s, !key)) b.add(mod, splice(phrase, v));
    }
    for (const auto& phrase : c.phrases_with(PhraseRole::kVerb)) {
      for (const auto& v : value_forms(s, !key)) {
        auto parts = splice(phrase, v);
        parts.insert(parts.begin(), lit("that"));
        b.add(mod, std::move(parts));
      }
    }

    const std::string slotnoun = nt({"SLOTNOUN", d.name, c.name});
    auto nouns = c.phrases_with(PhraseRole::kNoun);
    if (nouns.empty()) nouns.push_back(c.noun());
    for (const auto& n : nouns) b.add(slotnoun, {lit(n)});

    const std::string answer = nt({"VALPHRASE", d.name, c.name});
    b.add(answer, {Part::value(s)});
    b.add(answer, {Part::value(s), lit("please")});
    for (const auto& phrase : c.phrases_with(PhraseRole::kPrep)) {
      b.add(answer, splice(phrase, {Part::value(s)}));
    }
    for (const auto& phrase : c.phrases_with(PhraseRole::kVerb)) {
      auto parts = splice(phrase, {Part::value(s)});
      parts.insert(parts.begin(), lit("one that"));
      b.add(answer, std::move(parts));
    }
  }
  for (const auto& c : d.table.columns) {
    if (c.filterable) continue;
    const std::string slotnoun = nt({"SLOTNOUN", d.name, c.name});
    auto nouns = c.phrases_with(PhraseRole::kNoun);
    if (nouns.empty()) nouns.push_back(c.noun());
    for (const auto& n : nouns) b.add(slotnoun, {lit(n)});
  }

  const std::string np = nt({"NP", d.name});
  b.add(np, {lit("a"), ref(noun)});
  b.add(np, {lit("a"), ref(noun), ref(mod)});
  b.add(np, {lit("a"), ref(noun), ref(mod), lit("and"), ref(mod)});
  if (has_adj) {
    b.add(np, {lit("a"), ref(adj), ref(noun)});
    b.add(np, {lit("a"), ref(adj), ref(adj), ref(noun)});
    b.add(np, {lit("a"), ref(adj), ref(noun), ref(mod)});
  }

  // Agent-side descriptions of one recommended row.
  const std::string vb = nt({"VB", d.name});
  bool has_vb = false;
  for (const auto& c : d.table.columns) {
    if (!c.filterable || c.name == d.table.entity_key) continue;
    const ValueSlotSpec s = column_slot(d, c);
    for (const auto& phrase : c.phrases_with(PhraseRole::kVerb)) {
      b.add(vb, splice(phrase, {Part::value(s)}));
      has_vb = true;
    }
    for (const auto& phrase : c.phrases_with(PhraseRole::kPrep)) {
      auto parts = splice(phrase, {Part::value(s)});
      parts.insert(parts.begin(), lit("is"));
      b.add(vb, std::move(parts));
      has_vb = true;
    }
  }
  if (!has_vb) b.add(vb, {lit("is available")});
}

void action_phrases(Builder& b, const DomainSchema& d, const ActionSchema& a) {
  const std::string refp = nt({"ACTREF", d.name, a.name});
  const std::string standalone = nt({"ACT", d.name, a.name});
  auto refs = a.referring_phrases();
  auto alone = a.standalone_phrases();
  std::string fallback = a.name;
  for (auto& c : fallback) {
    if (c == '_') c = ' ';
  }
  if (refs.empty()) refs.push_back("do the " + fallback);
  if (alone.empty()) alone.push_back("do a " + fallback);
  for (const auto& p : refs) b.add(refp, {lit(p)});
  for (const auto& p : alone) b.add(standalone, {lit(p)});

  const std::string pmod = nt({"PMOD", d.name, a.name});
  for (const auto& p : a.params) {
    const ValueSlotSpec s = param_slot(d, p);
    auto preps = p.phrases_with(PhraseRole::kPrep);
    auto verbs = p.phrases_with(PhraseRole::kVerb);
    if (preps.empty() && verbs.empty()) preps.push_back("with " + p.noun() + " #");
    for (const auto& phrase : preps) b.add(pmod, splice(phrase, {Part::value(s)}));
    for (const auto& phrase : verbs) b.add(pmod, splice(phrase, {Part::value(s)}));

    const std::string answer = nt({"PVALPHRASE", d.name, a.name, p.name});
    b.add(answer, {Part::value(s)});
    b.add(answer, {Part::value(s), lit("please")});

    const std::string pnoun = nt({"PNOUN", d.name, a.name, p.name});
    auto nouns = p.phrases_with(PhraseRole::kNoun);
    if (nouns.empty()) nouns.push_back(p.noun());
    for (const auto& n : nouns) b.add(pnoun, {lit(n)});
  }
  const std::string pmods = nt({"PMODS", d.name, a.name});
  b.add(pmods, {ref(pmod)});
  b.add(pmods, {ref(pmod), ref(pmod)});
  b.add(pmods, {ref(pmod), ref(pmod), ref(pmod)});
}

void user_turns(Builder& b, const SchemaSet& schemas) {
  for (const char* s : {"hello", "hi", "hi there", "good morning"}) b.user("greet", {lit(s)});
  for (const char* s : {"what do you recommend", "which one do you recommend",
                        "can you recommend one"}) {
    b.user("ask_recommend", {lit(s)});
  }
  for (const char* s : {"yes", "yes please", "sure", "that sounds good"}) {
    b.user("accept_proposal", {lit(s)});
  }
  for (const char* s : {"no thanks", "no , i do not like that", "not that one"}) {
    b.user("reject_proposal", {lit(s)});
  }
  for (const char* s : {"yes , i am sure", "please try again", "do it anyway"}) {
    b.user("insist", {lit(s)});
  }
  for (const char* s : {"never mind", "cancel that", "forget it"}) b.user("cancel", {lit(s)});
  for (const char* s : {"thank you , goodbye", "that is all , thanks", "bye"}) {
    b.user("end", {lit(s)});
  }
  for (const char* s : {"ok thanks", "great , thank you", "thanks"}) {
    b.user("acknowledge", {lit(s)});
  }
  for (const char* s : {"i do not care", "it does not matter", "anything is fine"}) {
    b.user("answer_dontcare", {lit(s)});
  }

  for (const auto& d : schemas.domains()) {
    const Params pd{{"domain", d.name}};
    const std::string np = nt({"NP", d.name});
    const std::string mod = nt({"MOD", d.name});
    const std::string adj = nt({"ADJ", d.name});
    const bool has_adj = b.g.productions(adj) != nullptr;
    const ColumnSpec* key_col = d.table.column(d.table.entity_key);
    const Part name = Part::value(column_slot(d, *key_col));

    for (const char* s : {"i am looking for", "i need", "can you help me find", "i want"}) {
      b.user("exec_new_query", {lit(s), ref(np)}, pd);
    }
    if (b.g.productions(nt({"VALNOUN", d.name}))) {
      b.user("exec_new_query", {lit("i am looking for"), ref(nt({"VALNOUN", d.name}))}, pd);
    }
    for (const char* s : {"i also need", "can you also find me", "i am also looking for"}) {
      b.user("switch_domain", {lit(s), ref(np)}, pd);
    }
    for (const char* s : {"tell me about", "what can you tell me about",
                          "i want to know more about"}) {
      b.user("ask_about_entity", {lit(s), name}, pd);
    }
    b.user("select_entity", {name, lit("sounds good")}, pd);
    b.user("select_entity", {lit("i like"), name}, pd);
    b.user("select_entity", {lit("let us go with"), name}, pd);

    b.user("refine_query", {lit("do you have anything"), ref(mod)}, pd);
    b.user("refine_query", {lit("can you find one"), ref(mod)}, pd);
    b.user("change_proposed_slot", {lit("no , i would rather have one"), ref(mod)}, pd);
    b.user("change_proposed_slot", {lit("can i get one"), ref(mod), lit("instead")}, pd);
    b.user("change_slot", {lit("ok , try one"), ref(mod)}, pd);
    b.user("change_slot", {lit("what about one"), ref(mod)}, pd);
    if (has_adj) {
      b.user("refine_query", {lit("i would prefer something"), ref(adj)}, pd);
      b.user("change_proposed_slot", {lit("what about something"), ref(adj), lit("instead")},
             pd);
      b.user("change_slot", {lit("how about"), ref(adj), lit("ones")}, pd);
    }

    std::vector<const ColumnSpec*> requestable;
    for (const auto& c : d.table.columns) {
      const Params pc{{"domain", d.name}, {"slot", c.name}};
      const std::string slotnoun = nt({"SLOTNOUN", d.name, c.name});
      if (c.filterable) {
        b.user("answer_slot", {ref(nt({"VALPHRASE", d.name, c.name}))}, pc);
        if (c.name != d.table.entity_key) {
          b.user("answer_dontcare", {lit("any"), ref(slotnoun), lit("is fine")}, pc);
          b.user("answer_dontcare", {lit("i do not care about the"), ref(slotnoun)}, pc);
        }
      }
      if (!c.requestable) continue;
      requestable.push_back(&c);
      b.user("ask_attribute", {lit("what is the"), ref(slotnoun)}, pc);
      b.user("ask_attribute", {lit("what is their"), ref(slotnoun)}, pc);
      b.user("ask_attribute", {lit("can i get the"), ref(slotnoun), lit("please")}, pc);
      b.user("ask_attribute", {lit("what is the"), ref(slotnoun), lit("of"), name}, pc);
    }
    for (size_t i = 0; i < requestable.size(); ++i) {
      for (size_t j = i + 1; j < requestable.size(); ++j) {
        const Params pc{{"domain", d.name},
                        {"slot", requestable[i]->name},
                        {"slot2", requestable[j]->name}};
        b.user("ask_attribute",
               {lit("what is the"), ref(nt({"SLOTNOUN", d.name, requestable[i]->name})),
                lit("and"), ref(nt({"SLOTNOUN", d.name, requestable[j]->name}))},
               pc);
      }
    }

    for (const auto& a : d.actions) {
      const Params pa{{"domain", d.name}, {"action", a.name}};
      const std::string act = nt({"ACT", d.name, a.name});
      const std::string actref = nt({"ACTREF", d.name, a.name});
      const std::string pmods = nt({"PMODS", d.name, a.name});
      b.user("exec_new_action", {lit("i would like to"), ref(act)}, pa);
      b.user("exec_new_action", {lit("i would like to"), ref(act), ref(pmods)}, pa);
      b.user("exec_new_action", {lit("please"), ref(act), ref(pmods)}, pa);
      b.user("request_action", {lit("can you"), ref(actref)}, pa);
      b.user("request_action", {lit("please"), ref(actref), ref(pmods)}, pa);
      b.user("request_action", {lit("i want to"), ref(actref), ref(pmods)}, pa);
      b.user("accept_proposal", {lit("sure , i like that , can i"), ref(actref)}, pa);
      b.user("accept_proposal_params", {lit("yes ,"), ref(actref), ref(pmods)}, pa);
      b.user("accept_proposal_params", {lit("yes please ,"), ref(pmods)}, pa);
      b.user("change_proposed_param", {lit("no , make it"), ref(pmods)}, pa);
      b.user("change_proposed_param", {lit("actually ,"), ref(pmods), lit("instead")}, pa);
      b.user("change_param", {lit("how about"), ref(pmods)}, pa);
      b.user("change_param", {lit("try"), ref(pmods), lit("instead")}, pa);
      b.user("fill_slot", {ref(pmods)}, pa);
      for (const auto& p : a.params) {
        Params pp = pa;
        pp["slot"] = p.name;
        b.user("fill_slot", {ref(nt({"PVALPHRASE", d.name, a.name, p.name}))}, pp);
      }
    }
  }
}

void agent_turns(Builder& b, const SchemaSet& schemas) {
  b.agent("init", {lit("Hello , how can I help you ?")});
  b.agent("init", {lit("Hi ! What can I do for you today ?")});
  b.agent("greet", {lit("Hello ! What are you looking for today ?")});
  b.agent("greet", {lit("Hi there . How can I help ?")});
  b.agent("search_question", {lit("Do you have a specific"), ph("slot"), lit("in mind ?")});
  b.agent("search_question", {lit("I found"), ph("count"), ph("domains"), lit(". Which"),
                              ph("slot"), lit("would you like ?")});
  b.agent("search_question", {lit("There are"), ph("count"), lit("options . What"), ph("slot"),
                              lit("are you looking for ?")});
  b.agent("propose_refined_query", {lit("I found"), ph("count"), ph("domains"),
                                    lit(". Would you like one"), ph("constraint"), lit("?")});
  b.agent("propose_refined_query", {lit("There are"), ph("count"), ph("domains"),
                                    lit(". How about one"), ph("constraint"), lit("?")});
  b.agent("recommend_many", {lit("I found"), ph("count"), ph("domains"), lit(", including"),
                             ph("names"), lit(".")});
  b.agent("recommend_many", {lit("There are"), ph("count"), ph("domains"), lit(", for example"),
                             ph("names"), lit(". Do any of those sound good ?")});
  b.agent("answer_question", {ph("info"), lit("."), ph("offer")});
  b.agent("answer_question", {lit("Sure ,"), ph("info"), lit("."), ph("offer")});
  b.agent("empty_search", {lit("Sorry , I could not find any"), ph("what"),
                           lit(". Would you like a different"), ph("slot"), lit("?")});
  b.agent("empty_search", {lit("There is no"), ph("what"), lit(". Could you try another"),
                           ph("slot"), lit("?")});
  b.agent("propose_alternative", {lit("Sorry , there is no"), ph("what"),
                                  lit(". Shall I look for any"), ph("slot"), lit("instead ?")});
  b.agent("propose_alternative", {lit("I could not find any"), ph("what"),
                                  lit(". Would any"), ph("slot"), lit("work for you ?")});
  b.agent("slot_fill", {lit("What"), ph("slot"), lit("would you like ?")});
  b.agent("slot_fill", {lit("Can you tell me the"), ph("slot"), lit("?")});
  b.agent("confirm", {lit("Just to confirm , you want to"), ph("action"), lit("?")});
  b.agent("confirm", {lit("Shall I"), ph("action"), lit("?")});
  b.agent("action_success", {lit("Done ! I was able to"), ph("action"), lit(".")});
  b.agent("action_success", {lit("All set . Your request to"), ph("action"),
                             lit("went through .")});
  b.agent("action_error", {lit("Sorry , I could not"), ph("action"), lit(","), ph("problem"),
                           lit(". Would you like to change it ?")});
  b.agent("action_error", {lit("Unfortunately"), ph("problem"),
                           lit(". Do you want to try something different ?")});
  b.agent("anything_else", {lit("Is there anything else I can help you with ?")});
  b.agent("anything_else", {lit("Can I help you with anything else ?")});

  for (const auto& d : schemas.domains()) {
    const ColumnSpec* key = d.table.column(d.table.entity_key);
    const Part name = Part::value(column_slot(d, *key));
    const std::string vb = nt({"VB", d.name});
    // Domain-specific agent productions only apply to their own domain;
    // render_agent filters them through the "domain" parameter.
    const Params pd{{"domain", d.name}};
    b.add(std::string(kAgentTurn), {lit("How about"), name, lit("? It"), ref(vb), lit("."),
                                    ph("offer")},
          "recommend_one", pd);
    b.add(std::string(kAgentTurn), {lit("I would recommend"), name, lit(". It"), ref(vb),
                                    lit("."), ph("offer")},
          "recommend_one", pd);
    b.add(std::string(kAgentTurn), {lit("What would you like to know about"), name, lit("?")},
          "learn_more_what", pd);
    b.add(std::string(kAgentTurn), {name, lit("is a good choice . What would you like to know ?")},
          "learn_more_what", pd);
  }
}

}  // namespace

Grammar builtin_grammar(const SchemaSet& schemas) {
  Builder b;
  for (const auto& d : schemas.domains()) {
    domain_phrases(b, d);
    for (const auto& a : d.actions) action_phrases(b, d, a);
  }
  user_turns(b, schemas);
  agent_turns(b, schemas);
  b.g.validate();
  return std::move(b.g);
}

}  // namespace forge
