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

#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "forge/templates.h"
#include "world.h"

using namespace forge;
using namespace forge::testing;

namespace {

std::vector<ScoredDerivation> parse(const World& w, const std::string& text) {
  return parse_utterance(w.grammar, w.lexicon, text, [](const Derivation&) { return true; });
}

bool has_tag(const std::vector<ScoredDerivation>& ds, const std::string& tag) {
  for (const auto& d : ds) {
    if (d.derivation.tag == tag) return true;
  }
  return false;
}

// One representative per value slot, drawn from the data where possible.
ValueChoices representatives(const World& w) {
  return [&w](const ValueSlotSpec& s) -> std::vector<Value> {
    switch (s.kind) {
      case ValueKind::kInteger: return {Value::integer(2)};
      case ValueKind::kTimeOfDay: return {Value::time({18 * 60})};
      case ValueKind::kDayOfWeek: return {Value::day(Day::kFri)};
      default: break;
    }
    const DomainSchema* d = w.schemas.domain(s.domain);
    if (d && d->table.column(s.lex_column)) {
      const auto& vals = w.db.distinct(s.domain, s.lex_column);
      if (!vals.empty()) return {vals.front()};
    }
    return {Value::str("x")};
  };
}

}  // namespace

TEST_SUITE("templates") {
  TEST_CASE("parse goldens") {
    const World& w = five_world();
    auto ds = parse(w, "i am looking for indian food");
    REQUIRE(has_tag(ds, "exec_new_query"));
    for (const auto& d : ds) {
      if (d.derivation.tag != "exec_new_query") continue;
      REQUIRE(d.derivation.bindings.size() == 1);
      CHECK(d.derivation.bindings[0].slot == "food");
      CHECK(d.derivation.bindings[0].value == Value::str("indian"));
    }
    CHECK(has_tag(parse(w, "yes"), "accept_proposal"));
    CHECK(has_tag(parse(w, "Yes ."), "accept_proposal"));
    CHECK(parse(w, "zorp blat quux").empty());
    CHECK(parse(w, "").empty());
  }

  TEST_CASE("every enumerated user turn parses back") {
    const World& w = five_world();
    const auto all = [](const Production&) { return true; };
    const auto expansions =
        enumerate_expansions(w.grammar, kUserTurn, all, representatives(w), 40);
    REQUIRE(expansions.size() > 100);
    size_t missed = 0;
    for (const auto& e : expansions) {
      bool found = false;
      for (const auto& d : parse(w, e.utterance)) {
        found = found || (d.derivation.tag == e.derivation.tag &&
                          d.derivation.bindings == e.derivation.bindings);
      }
      if (!found) {
        ++missed;
        MESSAGE("not recovered: " << e.utterance << " [" << e.derivation.tag << "]");
      }
    }
    CHECK(missed == 0);
  }

  TEST_CASE("enumeration respects the limit and the filter") {
    const World& w = five_world();
    const auto only = [](const Production& p) { return p.tag == "greet"; };
    const auto greet = enumerate_expansions(w.grammar, kUserTurn, only, representatives(w), 100);
    CHECK(greet.size() == 4);
    const auto capped = enumerate_expansions(
        w.grammar, kUserTurn, [](const Production& p) { return p.tag == "exec_new_query"; },
        representatives(w), 3);
    // Capped per start production, of which there are five for one domain.
    CHECK(capped.size() <= 3 * 5);
  }

  TEST_CASE("expand goldens") {
    const World& w = five_world();
    Rng rng(5);
    ExpandRequest req;
    req.start = std::string(kAgentTurn);
    req.filter = [](const Production& p) {
      return p.tag == "recommend_one" && p.parts[0].text == "How about";
    };
    req.fixed["restaurant.name"] = Value::str("curry garden");
    req.fixed["restaurant.food"] = Value::str("indian");
    req.text["offer"] = "";
    req.sampler = database_sampler(w.db);
    bool serves = false;
    for (int i = 0; i < 20; ++i) {
      Expansion e = expand(w.grammar, req, rng);
      CHECK(e.utterance.rfind("How about curry garden ? It", 0) == 0);
      serves = serves || e.utterance.rfind("How about curry garden ? It serves indian", 0) == 0;
    }
    CHECK(serves);

    ExpandRequest accept;
    accept.start = std::string(kUserTurn);
    accept.filter = [](const Production& p) {
      return p.tag == "accept_proposal" && p.parts[0].text == "sure , i like that , can i";
    };
    accept.sampler = database_sampler(w.db);
    std::set<std::string> seen;
    for (int i = 0; i < 30; ++i) seen.insert(expand(w.grammar, accept, rng).utterance);
    CHECK(seen.count("sure , i like that , can i book it"));
    CHECK(seen.count("sure , i like that , can i reserve it"));
  }

  TEST_CASE("template files extend the grammar") {
    const World& base = five_world();
    Grammar g = base.grammar;
    const auto path = std::filesystem::temp_directory_path() / "forge_templates_test.jsonl";
    {
      std::ofstream out(path);
      out << R"({"nonterminal": "USER_TURN", "parts": ["i want", {"value": "restaurant.food"}, "cuisine"], "tag": "exec_new_query", "params": {"domain": "restaurant"}})"
          << "\n";
    }
    const size_t before = g.size();
    load_template_file(path.string(), base.schemas, g);
    CHECK(g.size() == before + 1);
    auto ds = parse_utterance(g, base.lexicon, "i want indian cuisine",
                              [](const Derivation&) { return true; });
    CHECK(has_tag(ds, "exec_new_query"));

    {
      std::ofstream out(path);
      out << R"({"nonterminal": "USER_TURN", "parts": [{"value": "restaurant.stars"}]})" << "\n";
    }
    CHECK_THROWS_AS(load_template_file(path.string(), base.schemas, g), Error);
    {
      std::ofstream out(path);
      out << "{not json\n";
    }
    try {
      load_template_file(path.string(), base.schemas, g);
      FAIL("bad json accepted");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::kParse);
    }
    std::filesystem::remove(path);
  }

  TEST_CASE("lexicon") {
    const World& w = five_world();
    CHECK(w.lexicon.contains("restaurant", "food", Value::str("indian")));
    CHECK_FALSE(w.lexicon.contains("restaurant", "food", Value::str("klingon")));
    const auto m = w.lexicon.lookup(tokenize("pizza hut city centre please"), 0);
    bool whole = false;
    for (const auto& x : m) whole = whole || x.end == 4;
    CHECK(whole);
  }
}
